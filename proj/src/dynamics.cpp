#include "reachspan/dynamics.hpp"

#include <stdexcept>

namespace reachspan {

namespace {

Eigen::Matrix3d rpy_rotation(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy[2], Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy[1], Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy[0], Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

void check_q(const RobotModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.dof())
    throw std::runtime_error("configuration size " + std::to_string(q.size()) +
                             " does not match dof " + std::to_string(model.dof()));
}

int check_frame(const RobotModel& model, int frame) {
  if (frame < 0 || frame >= model.dof())
    throw std::runtime_error("frame index " + std::to_string(frame) + " out of range");
  return frame;
}

// Velocity/acceleration state of every joint frame for qdd = 0.
struct MotionPass {
  std::vector<Eigen::Vector3d> w;      // angular velocity of link i
  std::vector<Eigen::Vector3d> wd;     // angular acceleration of link i (qdd = 0)
  std::vector<Eigen::Vector3d> a;      // linear acceleration of joint origin i
};

// base_acc is the fictitious base acceleration (-gravity to include gravity
// load, zero for purely kinematic quantities).
MotionPass motion_pass(const RobotModel& model, const KinematicsPass& kin,
                       const Eigen::VectorXd& qd, const Eigen::Vector3d& base_acc) {
  const int n = model.dof();
  MotionPass mp;
  mp.w.resize(n);
  mp.wd.resize(n);
  mp.a.resize(n);

  Eigen::Vector3d w_prev = Eigen::Vector3d::Zero();
  Eigen::Vector3d wd_prev = Eigen::Vector3d::Zero();
  Eigen::Vector3d a_prev = base_acc;
  Eigen::Vector3d o_prev = Eigen::Vector3d::Zero();

  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d d = kin.o[i] - o_prev;
    const Eigen::Vector3d a_here = a_prev + wd_prev.cross(d) + w_prev.cross(w_prev.cross(d));
    mp.w[i] = w_prev + kin.z[i] * qd[i];
    mp.wd[i] = wd_prev + w_prev.cross(kin.z[i]) * qd[i];
    mp.a[i] = a_here;
    w_prev = mp.w[i];
    wd_prev = mp.wd[i];
    a_prev = a_here;
    o_prev = kin.o[i];
  }
  return mp;
}

}  // namespace

KinematicsPass kinematics_pass(const RobotModel& model, const Eigen::VectorXd& q) {
  check_q(model, q);
  const int n = model.dof();
  KinematicsPass kin;
  kin.R.resize(n);
  kin.o.resize(n);
  kin.z.resize(n);
  kin.com.resize(n);
  kin.I.resize(n);

  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d o = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    const JointSpec& jt = model.joints[i];
    o = o + R * jt.origin_xyz;
    const Eigen::Matrix3d R_pre = R * rpy_rotation(jt.origin_rpy);
    const Eigen::Vector3d z = R_pre * jt.axis;
    R = R_pre * Eigen::AngleAxisd(q[i], jt.axis).toRotationMatrix();

    kin.R[i] = R;
    kin.o[i] = o;
    kin.z[i] = z;
    kin.com[i] = o + R * jt.link_com;
    kin.I[i] = R * jt.link_inertia * R.transpose();
  }
  return kin;
}

Eigen::Vector3d forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q,
                                   int frame, const Eigen::Vector3d& local_point) {
  check_frame(model, frame);
  const KinematicsPass kin = kinematics_pass(model, q);
  return kin.o[frame] + kin.R[frame] * local_point;
}

Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                         int frame, const Eigen::Vector3d& local_point) {
  check_frame(model, frame);
  const KinematicsPass kin = kinematics_pass(model, q);
  const Eigen::Vector3d p = kin.o[frame] + kin.R[frame] * local_point;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, model.dof());
  for (int i = 0; i <= frame; ++i) J.col(i) = kin.z[i].cross(p - kin.o[i]);
  return J;
}

Eigen::Vector3d jdot_qdot(const RobotModel& model, const Eigen::VectorXd& q,
                          const Eigen::VectorXd& qd, int frame,
                          const Eigen::Vector3d& local_point) {
  check_frame(model, frame);
  check_q(model, qd);
  const KinematicsPass kin = kinematics_pass(model, q);
  const MotionPass mp = motion_pass(model, kin, qd, Eigen::Vector3d::Zero());
  const Eigen::Vector3d r = kin.R[frame] * local_point;
  return mp.a[frame] + mp.wd[frame].cross(r) + mp.w[frame].cross(mp.w[frame].cross(r));
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q) {
  const KinematicsPass kin = kinematics_pass(model, q);
  const int n = model.dof();

  // Composite body seen by joint i: everything from link i to the tip.
  std::vector<double> cm(n);          // composite mass
  std::vector<Eigen::Vector3d> cc(n); // composite COM
  std::vector<Eigen::Matrix3d> ci(n); // composite inertia about composite COM
  for (int i = n - 1; i >= 0; --i) {
    double m = model.joints[i].link_mass;
    Eigen::Vector3d c = kin.com[i];
    Eigen::Matrix3d I = kin.I[i];
    if (i + 1 < n) {
      const double mt = m + cm[i + 1];
      const Eigen::Vector3d ct = mt > 0.0 ? Eigen::Vector3d((m * c + cm[i + 1] * cc[i + 1]) / mt)
                                          : c;
      auto shift = [](double mass, const Eigen::Vector3d& d) -> Eigen::Matrix3d {
        return mass * (d.squaredNorm() * Eigen::Matrix3d::Identity() - d * d.transpose());
      };
      I = I + shift(m, c - ct) + ci[i + 1] + shift(cm[i + 1], cc[i + 1] - ct);
      m = mt;
      c = ct;
    }
    cm[i] = m;
    cc[i] = c;
    ci[i] = I;
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    // Wrench produced by unit qdd_j acting on the composite body at joint j.
    const Eigen::Vector3d f = cm[j] * kin.z[j].cross(cc[j] - kin.o[j]);
    const Eigen::Vector3d n_about_oj = ci[j] * kin.z[j] + (cc[j] - kin.o[j]).cross(f);
    for (int i = 0; i <= j; ++i) {
      // Project onto joint i's axis, transporting the moment to o_i.
      const double mij = kin.z[i].dot(n_about_oj + (kin.o[j] - kin.o[i]).cross(f));
      M(i, j) = mij;
      M(j, i) = mij;
    }
  }
  return M;
}

Eigen::VectorXd bias_torque(const RobotModel& model, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& qd) {
  check_q(model, qd);
  const KinematicsPass kin = kinematics_pass(model, q);
  const MotionPass mp = motion_pass(model, kin, qd, -model.gravity);
  const int n = model.dof();

  Eigen::VectorXd tau(n);
  Eigen::Vector3d f_child = Eigen::Vector3d::Zero();
  Eigen::Vector3d n_child = Eigen::Vector3d::Zero();  // moment about o_{i+1}
  for (int i = n - 1; i >= 0; --i) {
    const Eigen::Vector3d r = kin.com[i] - kin.o[i];
    const Eigen::Vector3d a_com =
        mp.a[i] + mp.wd[i].cross(r) + mp.w[i].cross(mp.w[i].cross(r));
    const Eigen::Vector3d F = model.joints[i].link_mass * a_com;
    const Eigen::Vector3d N = kin.I[i] * mp.wd[i] + mp.w[i].cross(kin.I[i] * mp.w[i]);

    Eigen::Vector3d n_here = N + r.cross(F);
    if (i + 1 < n) n_here += n_child + (kin.o[i + 1] - kin.o[i]).cross(f_child);
    const Eigen::Vector3d f_here = F + f_child;

    tau[i] = kin.z[i].dot(n_here);
    f_child = f_here;
    n_child = n_here;
  }
  return tau;
}

Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd, const Eigen::VectorXd& tau) {
  if (tau.size() != model.dof()) throw std::runtime_error("torque vector size mismatch");
  const Eigen::MatrixXd M = mass_matrix(model, q);
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("mass matrix is not positive definite");
  return llt.solve(tau - bias_torque(model, q, qd));
}

}  // namespace reachspan
