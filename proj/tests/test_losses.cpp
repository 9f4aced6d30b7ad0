#include "doctest.h"
#include "support.hpp"

#include <cmath>

#include "sacher/critics.hpp"
#include "sacher/learner.hpp"

using namespace sacher;
using sacher::testing::numeric_gradient;
using sacher::testing::relative_error;

namespace {

std::vector<Transition> random_transitions(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> tau(-0.5, 0.5);
  std::vector<Transition> out(n);
  for (Transition& t : out) {
    t.state = {u(rng), u(rng), 1.0 + u(rng) / 4, u(rng), u(rng) / 4};
    t.next_state = {u(rng), u(rng), 1.0 + u(rng) / 4, u(rng), u(rng) / 4};
    t.goal = {u(rng) / 2, u(rng) / 2};
    t.action = tau(rng);
    t.reward = u(rng);
    t.done = u(rng) > 1.0;
  }
  return out;
}

LearnerConfig tiny_config() {
  LearnerConfig lc;
  lc.hidden = {8, 8};
  return lc;
}

bool far_from_kinks(const GradientTape& tape) {
  return sacher::testing::min_abs_hidden_preactivation(tape) > 1e-3;
}

}  // namespace

TEST_CASE("critic loss gradient matches central differences") {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int trials = 0;
  while (trials < 100) {
    SacLearner learner(tiny_config(), rng);
    learner.temperature().log_alpha = std::log(0.2);
    const Batch batch = make_batch(random_transitions(2, rng));
    const UpdateNoise noise = UpdateNoise::draw(batch.size(), rng);
    TwinCritics critics = learner.critics();
    const Eigen::MatrixXd in = critic_inputs(batch.obs, batch.actions);
    if (!far_from_kinks(critics.q1.forward(in).tape) || !far_from_kinks(critics.q2.forward(in).tape)) continue;

    const CriticLoss cl = critic_loss(critics, learner.policy(), learner.temperature(), batch, 0.99, noise.next_action);
    TwinCritics probe = critics;
    const auto f1 = [&](const Eigen::VectorXd& p) {
      probe.q1.set_params(p);
      return critic_loss(probe, learner.policy(), learner.temperature(), batch, 0.99, noise.next_action).loss_q1;
    };
    const auto f2 = [&](const Eigen::VectorXd& p) {
      probe.q2.set_params(p);
      return critic_loss(probe, learner.policy(), learner.temperature(), batch, 0.99, noise.next_action).loss_q2;
    };
    worst = std::max(worst, relative_error(cl.grad_q1, numeric_gradient(f1, critics.q1.params())));
    probe = critics;
    worst = std::max(worst, relative_error(cl.grad_q2, numeric_gradient(f2, critics.q2.params())));
    ++trials;
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("actor loss gradient matches central differences through the reparameterized path") {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int trials = 0;
  while (trials < 100) {
    SacLearner learner(tiny_config(), rng);
    learner.temperature().log_alpha = std::log(0.5);
    const Batch batch = make_batch(random_transitions(2, rng));
    const UpdateNoise noise = UpdateNoise::draw(batch.size(), rng);
    const TwinCritics& qs = learner.critics();
    const PolicyBatch pb = learner.policy().sample_batch(batch.obs, noise.actor);
    const Eigen::MatrixXd in = critic_inputs(batch.obs, pb.actions);
    const ForwardResult f1 = qs.q1.forward(in), f2 = qs.q2.forward(in);
    if (!far_from_kinks(pb.tape) || !far_from_kinks(f1.tape) || !far_from_kinks(f2.tape)) continue;
    if ((f1.output - f2.output).cwiseAbs().minCoeff() < 1e-3) continue;

    const ActorLoss al = actor_loss(qs, learner.policy(), learner.temperature(), batch, noise.actor);
    GaussianPolicy probe = learner.policy();
    const auto f = [&](const Eigen::VectorXd& p) {
      probe.net().set_params(p);
      return actor_loss(qs, probe, learner.temperature(), batch, noise.actor).loss;
    };
    worst = std::max(worst, relative_error(al.grad, numeric_gradient(f, learner.policy().net().params())));
    ++trials;
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("temperature loss gradient, sign and stationary point") {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Temperature t;
    t.log_alpha = n(rng);
    Eigen::VectorXd logp(16);
    for (Eigen::Index i = 0; i < logp.size(); ++i) logp(i) = n(rng);
    const TemperatureLoss tl = temperature_loss(t, logp);
    const auto f = [&](const Eigen::VectorXd& la) {
      Temperature p = t;
      p.log_alpha = la(0);
      return temperature_loss(p, logp).loss;
    };
    const Eigen::VectorXd num = numeric_gradient(f, Eigen::VectorXd::Constant(1, t.log_alpha), 1e-6);
    worst = std::max(worst, relative_error(Eigen::VectorXd::Constant(1, tl.grad), num));
  }
  CHECK(worst < 1e-6);

  Temperature t;
  t.target_entropy = -1.0;
  // mean log_prob == -target_entropy
  Eigen::VectorXd at_target(2);
  at_target << 0.5, 1.5;
  CHECK(temperature_loss(t, at_target).grad == 0.0);
  // entropy too low (log_prob above 1): a descent step raises log_alpha
  Eigen::VectorXd confident = Eigen::VectorXd::Constant(4, 3.0);
  CHECK(temperature_loss(t, confident).grad < 0.0);
  Eigen::VectorXd diffuse = Eigen::VectorXd::Constant(4, -3.0);
  CHECK(temperature_loss(t, diffuse).grad > 0.0);
}

TEST_CASE("critic loss examples") {
  std::mt19937_64 rng(404);
  SacLearner learner(tiny_config(), rng);
  const std::vector<Transition> one = random_transitions(1, rng);
  std::vector<Transition> terminal = one;
  terminal[0].done = true;
  terminal[0].reward = -1.25;
  const Batch tb = make_batch(terminal);
  const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 0.1);
  const CriticLoss cl = critic_loss(learner.critics(), learner.policy(), learner.temperature(), tb, 0.99, xi);
  CHECK(cl.targets(0) == -1.25);

  // make both critics output exactly y: zero weights, output bias = y
  TwinCritics exact = learner.critics();
  for (Mlp* q : {&exact.q1, &exact.q2}) {
    q->mutable_params().setZero();
    q->mutable_bias(q->num_layers() - 1)(0) = -1.25;
  }
  const CriticLoss zero = critic_loss(exact, learner.policy(), learner.temperature(), tb, 0.99, xi);
  CHECK(zero.loss == 0.0);
  CHECK(zero.grad_q1.isZero(0.0));
  CHECK(zero.grad_q2.isZero(0.0));

  // targets do not move when the live critics move
  TwinCritics moved = learner.critics();
  moved.q1.mutable_params().array() += 0.3;
  const Batch nb = make_batch(one);
  CHECK(critic_loss(moved, learner.policy(), learner.temperature(), nb, 0.99, xi).targets ==
        critic_loss(learner.critics(), learner.policy(), learner.temperature(), nb, 0.99, xi).targets);
}

TEST_CASE("actor loss examples") {
  std::mt19937_64 rng(505);
  SacLearner learner(tiny_config(), rng);
  const Batch batch = make_batch(random_transitions(4, rng));
  const Eigen::VectorXd xi = UpdateNoise::draw(4, rng).actor;

  TwinCritics flat = learner.critics();
  for (Mlp* q : {&flat.q1, &flat.q2}) {
    q->mutable_params().setZero();
    q->mutable_bias(q->num_layers() - 1)(0) = 2.0;
  }
  Temperature zero_alpha;
  zero_alpha.log_alpha = -INFINITY;
  const ActorLoss al = actor_loss(flat, learner.policy(), zero_alpha, batch, xi);
  CHECK(al.loss == -2.0);
  CHECK(al.grad.isZero(0.0));

  // the loss is affine in alpha with slope mean(log_prob)
  Temperature a1, a2;
  a1.log_alpha = std::log(0.1);
  a2.log_alpha = std::log(0.7);
  const ActorLoss l1 = actor_loss(learner.critics(), learner.policy(), a1, batch, xi);
  const ActorLoss l2 = actor_loss(learner.critics(), learner.policy(), a2, batch, xi);
  CHECK(l2.loss - l1.loss == doctest::Approx((0.7 - 0.1) * l1.log_probs.mean()).epsilon(1e-10));
  CHECK(l1.log_probs == l2.log_probs);
}

TEST_CASE("Polyak averaging") {
  Mlp live({1, 1}), target({1, 1});
  live.mutable_params().setOnes();
  target.mutable_params().setZero();
  polyak_update(live, target, 0.005);
  CHECK(target.params()(0) == doctest::Approx(0.005).epsilon(1e-15));

  std::mt19937_64 rng(606);
  Mlp a = sacher::testing::random_mlp({3, 4, 1}, rng);
  Mlp b = sacher::testing::random_mlp({3, 4, 1}, rng);
  Mlp keep = b;
  polyak_update(a, keep, 0.0);
  CHECK(keep.params() == b.params());
  polyak_update(a, keep, 1.0);
  CHECK(keep.params() == a.params());

  // convex combination: each target coordinate stays between old and live
  Mlp c = b;
  polyak_update(a, c, 0.3);
  for (Eigen::Index i = 0; i < c.num_params(); ++i) {
    CHECK(c.params()(i) >= std::min(a.params()(i), b.params()(i)) - 1e-15);
    CHECK(c.params()(i) <= std::max(a.params()(i), b.params()(i)) + 1e-15);
  }
  CHECK_THROWS(polyak_update(Mlp({3, 5, 1}), c, 0.5));
}

TEST_CASE("update keeps alpha positive and parameters finite") {
  std::mt19937_64 rng(707);
  SacLearner learner(tiny_config(), rng);
  const std::vector<Transition> data = random_transitions(64, rng);
  for (int i = 0; i < 300; ++i) {
    const UpdateStats st = learner.update(data, rng);
    CHECK(st.alpha > 0.0);
  }
  CHECK(learner.policy().net().all_finite());
  CHECK(learner.critics().q1.all_finite());
  CHECK(learner.updates() == 300);
}

TEST_CASE("learner checkpoint round trip") {
  std::mt19937_64 rng(808);
  SacLearner learner(tiny_config(), rng);
  learner.update(random_transitions(8, rng), rng);
  const SacLearner back = SacLearner::from_checkpoint(learner.to_checkpoint(), tiny_config());
  CHECK(back.policy().net().params() == learner.policy().net().params());
  CHECK(back.critics().target_q2.params() == learner.critics().target_q2.params());
  CHECK(back.temperature().log_alpha == learner.temperature().log_alpha);
}
