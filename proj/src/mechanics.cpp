#include <cmath>

#include <Eigen/Geometry>

#include "quaternion.hpp"
#include "stiffsim/mechanics.hpp"

namespace stiffsim {

namespace {

// Calls f(q_index, v_index) for every Euclidean coordinate pair.
template <typename F>
void for_each_euclidean(const ModelInfo& info, F&& f) {
  int iv = 0;
  for (int iq = 0; iq < info.nq; ++iq) {
    if (info.quaternion_q >= 0 && iq == info.quaternion_q) {
      iq += 3;
      continue;
    }
    if (info.quaternion_v >= 0 && iv == info.quaternion_v) iv += 3;
    f(iq, iv);
    ++iv;
  }
}

}  // namespace

double Model::kinetic_energy(const Eigen::VectorXd& q,
                             const Eigen::VectorXd& v) const {
  return 0.5 * v.dot(mass_matrix(q) * v);
}

Eigen::VectorXd Model::integrate_configuration(const Eigen::VectorXd& q,
                                               const Eigen::VectorXd& dq) const {
  const ModelInfo& mi = info();
  Eigen::VectorXd out = q;
  for_each_euclidean(mi, [&](int iq, int iv) { out(iq) += dq(iv); });
  if (mi.quaternion_q >= 0) {
    const Eigen::Quaterniond rot =
        detail::quat_from_wxyz(q.segment<4>(mi.quaternion_q));
    const Eigen::Quaterniond next =
        (rot * detail::quat_exp(dq.segment<3>(mi.quaternion_v))).normalized();
    out.segment<4>(mi.quaternion_q) = detail::quat_to_wxyz(next);
  }
  return out;
}

Eigen::VectorXd Model::difference_configuration(
    const Eigen::VectorXd& q1, const Eigen::VectorXd& q0) const {
  const ModelInfo& mi = info();
  Eigen::VectorXd out(mi.nv);
  for_each_euclidean(mi, [&](int iq, int iv) { out(iv) = q1(iq) - q0(iq); });
  if (mi.quaternion_q >= 0) {
    const Eigen::Quaterniond r1 =
        detail::quat_from_wxyz(q1.segment<4>(mi.quaternion_q));
    const Eigen::Quaterniond r0 =
        detail::quat_from_wxyz(q0.segment<4>(mi.quaternion_q));
    out.segment<3>(mi.quaternion_v) = detail::quat_log(r0.conjugate() * r1);
  }
  return out;
}

Eigen::VectorXd Model::state_difference(const RobotState& x1,
                                        const RobotState& x2) const {
  const int nv = info().nv;
  Eigen::VectorXd out(2 * nv);
  out.head(nv) = difference_configuration(x1.q, x2.q);
  out.tail(nv) = x1.v - x2.v;
  return out;
}

Eigen::VectorXd Model::zero_input() const {
  return Eigen::VectorXd::Zero(info().nv);
}

}  // namespace stiffsim
