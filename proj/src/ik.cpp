// Copyright 2026 The EgoDemo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "egodemo/ik.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "egodemo/error.hpp"
#include "egodemo/kinematics.hpp"
#include "egodemo/random.hpp"

namespace egodemo {

IkSchedule IkSchedule::defaults() {
  IkSchedule s;
  s.stages = {{1e-3, 1e-2, 100}, {5e-3, 5e-2, 100}, {1e-2, 1e-1, 200}};
  s.restarts = 5;
  return s;
}

void IkSchedule::validate() const {
  if (stages.empty()) throw InvalidArgument("IK schedule needs at least one stage");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const IkStage& s = stages[i];
    if (!(s.position_tolerance > 0.0) || !(s.orientation_tolerance > 0.0)) {
      throw InvalidArgument("IK tolerances must be positive");
    }
    if (s.max_iterations < 1) throw InvalidArgument("IK stage iteration count must be >= 1");
    if (i > 0 && !(s.position_tolerance > stages[i - 1].position_tolerance &&
                   s.orientation_tolerance > stages[i - 1].orientation_tolerance)) {
      throw InvalidArgument("IK stage tolerances must strictly increase");
    }
  }
  if (restarts < 1) throw InvalidArgument("IK restarts must be >= 1");
  if (!(damping.initial > 0.0) || !(damping.increase > 1.0) || !(damping.decrease > 1.0) ||
      !(damping.min > 0.0) || !(damping.min <= damping.max)) {
    throw InvalidArgument("invalid LM damping parameters");
  }
}

namespace {

using Vector6d = Eigen::Matrix<double, 6, 1>;

Vector6d pose_residual(const RigidTransform& target, const RigidTransform& current) {
  Vector6d e;
  e.head<3>() = target.translation() - current.translation();
  e.tail<3>() = rotation_log(target.rotation() * current.rotation().transpose());
  return e;
}

bool within(const Vector6d& e, const IkStage& stage) {
  return e.head<3>().norm() <= stage.position_tolerance && e.tail<3>().norm() <= stage.orientation_tolerance;
}

struct Attempt {
  Eigen::VectorXd q;
  Vector6d error;
  int iterations = 0;
};

class LmSolver {
 public:
  LmSolver(const RobotModel& model, Arm arm, const RigidTransform& target, const Eigen::VectorXd& init,
           const IkSchedule& schedule)
      : model_(model), arm_(arm), chain_(model.arm(arm)), target_(target), init_(init), schedule_(schedule) {}

  Eigen::VectorXd clamp(Eigen::VectorXd q) const {
    for (int i = 0; i < q.size(); ++i) {
      if (frozen(i)) {
        q[i] = init_[i];
      } else {
        q[i] = std::min(std::max(q[i], chain_.lower[i]), chain_.upper[i]);
      }
    }
    return q;
  }

  bool frozen(int i) const { return !schedule_.joint_mask.empty() && schedule_.joint_mask[i]; }

  Attempt refine(const Eigen::VectorXd& start, const IkStage& stage) const {
    Attempt a;
    a.q = clamp(start);
    a.error = pose_residual(target_, forward_kinematics_unchecked(model_, arm_, a.q));
    double cost = a.error.squaredNorm();
    double lambda = schedule_.damping.initial;
    const int n = chain_.dof();
    while (a.iterations < stage.max_iterations && !within(a.error, stage)) {
      ++a.iterations;
      Jacobian jac = arm_jacobian(model_, arm_, a.q);
      for (int i = 0; i < n; ++i)
        if (frozen(i)) jac.col(i).setZero();
      Eigen::MatrixXd normal = jac.transpose() * jac;
      normal.diagonal().array() += lambda;
      const Eigen::VectorXd step = normal.ldlt().solve(jac.transpose() * a.error);
      if (!step.allFinite()) break;
      const Eigen::VectorXd candidate = clamp(a.q + step);
      const Vector6d e = pose_residual(target_, forward_kinematics_unchecked(model_, arm_, candidate));
      const double c = e.squaredNorm();
      if (c < cost) {
        a.q = candidate;
        a.error = e;
        cost = c;
        lambda = std::max(lambda / schedule_.damping.decrease, schedule_.damping.min);
      } else {
        if (lambda >= schedule_.damping.max) break;
        lambda = std::min(lambda * schedule_.damping.increase, schedule_.damping.max);
      }
    }
    return a;
  }

  Eigen::VectorXd random_start(Rng& rng) const {
    Eigen::VectorXd q(chain_.dof());
    for (int i = 0; i < q.size(); ++i) q[i] = frozen(i) ? init_[i] : uniform(rng, chain_.lower[i], chain_.upper[i]);
    return q;
  }

 private:
  const RobotModel& model_;
  Arm arm_;
  const ArmChain& chain_;
  const RigidTransform& target_;
  const Eigen::VectorXd& init_;
  const IkSchedule& schedule_;
};

}  // namespace

IkResult solve_ik(const RobotModel& model, Arm arm, const RigidTransform& target, const Eigen::VectorXd& init,
                  const IkSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  check_joint_limits(model, arm, init);
  const ArmChain& chain = model.arm(arm);
  if (!schedule.joint_mask.empty() && static_cast<int>(schedule.joint_mask.size()) != chain.dof()) {
    throw InvalidArgument("IK joint mask size does not match the arm's joint count");
  }

  LmSolver solver(model, arm, target, init, schedule);
  Rng rng(seed);
  Attempt best;
  double best_cost = std::numeric_limits<double>::infinity();
  int iterations = 0;

  auto finish = [&](const Attempt& a, IkStatus status, int stage) {
    IkResult r;
    r.joints = a.q;
    r.status = status;
    r.stage = stage;
    r.position_error = a.error.head<3>().norm();
    r.orientation_error = a.error.tail<3>().norm();
    r.iterations = iterations;
    return r;
  };

  for (std::size_t k = 0; k < schedule.stages.size(); ++k) {
    const IkStage& stage = schedule.stages[k];
    // A result from a tighter stage may already satisfy this one.
    if (best_cost < std::numeric_limits<double>::infinity() && within(best.error, stage)) {
      return finish(best, IkStatus::kConverged, static_cast<int>(k));
    }
    for (int attempt = 0; attempt <= schedule.restarts; ++attempt) {
      const Eigen::VectorXd start = attempt == 0 ? init : solver.random_start(rng);
      Attempt a = solver.refine(start, stage);
      iterations += a.iterations;
      if (within(a.error, stage)) return finish(a, IkStatus::kConverged, static_cast<int>(k));
      const double c = a.error.squaredNorm();
      if (c < best_cost) {
        best_cost = c;
        best = std::move(a);
      }
    }
  }
  return finish(best, IkStatus::kFailed, -1);
}

}  // namespace egodemo
