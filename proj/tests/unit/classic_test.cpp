// Copyright 2026 The olidkit Authors.
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

#include <gtest/gtest.h>

#include <cmath>

#include "olid/classic.hpp"
#include "olid/error.hpp"
#include "olid/random.hpp"
#include "synthetic.hpp"

namespace olid {
namespace {

const std::vector<std::string> kAB{"NOT", "OFF"};
const std::vector<std::string> kABC{"IND", "GRP", "OTH"};

/// Two Gaussian-ish blobs separated along the first axis by a gap of at least `margin`.
LabeledMatrix blobs(std::size_t n, double margin, std::uint64_t seed) {
  auto rng = make_rng(seed);
  LabeledMatrix d{MatrixD(static_cast<Eigen::Index>(n), 2), {}, kAB};
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    const double side = y ? 1.0 : -1.0;
    d.features(static_cast<Eigen::Index>(i), 0) = side * (margin / 2 + uniform(rng, 0, 2));
    d.features(static_cast<Eigen::Index>(i), 1) = uniform(rng, -3, 3);
    d.labels.push_back(y);
  }
  return d;
}

/// Noisy three-class data on a few informative features.
LabeledMatrix three_class(std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  LabeledMatrix d{MatrixD(static_cast<Eigen::Index>(n), 4), {}, kABC};
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(uniform_index(rng, 3));
    const auto r = static_cast<Eigen::Index>(i);
    d.features(r, 0) = y + normal01(rng) * 0.6;
    d.features(r, 1) = (y == 2 ? 1.0 : -1.0) + normal01(rng) * 0.8;
    d.features(r, 2) = normal01(rng);
    d.features(r, 3) = uniform(rng, 0, 1);
    d.labels.push_back(y);
  }
  return d;
}

double accuracy(const Model& m, const LabeledMatrix& d) {
  const auto pred = m.predict(d.features);
  int hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == d.labels[i];
  return double(hits) / static_cast<double>(pred.size());
}

Model constant_logreg(const std::vector<double>& probs, int d) {
  const auto K = static_cast<Eigen::Index>(probs.size());
  LogRegState s{Standardizer{VectorD::Zero(d), VectorD::Ones(d)}, MatrixD::Zero(K, d),
                VectorD(K)};
  for (Eigen::Index k = 0; k < K; ++k) s.bias(k) = std::log(probs[static_cast<std::size_t>(k)]);
  return Model(s, kABC.size() == probs.size() ? kABC : kAB, d);
}

void expect_rows_are_distributions(const MatrixD& p) {
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-6);
    EXPECT_GE(p.row(i).minCoeff(), 0.0);
  }
}

ClassifierSpec fast_spec(ClassifierKind k, std::uint64_t seed = 42) {
  auto s = ClassifierSpec::defaults(k, seed);
  if (auto* f = std::get_if<ForestParams>(&s.hyper)) f->n_trees = 20;
  if (auto* b = std::get_if<BoostingParams>(&s.hyper)) b->n_stages = 20;
  if (auto* m = std::get_if<MlpParams>(&s.hyper)) m->max_epochs = 50;
  return s;
}

constexpr std::array<ClassifierKind, 4> kKinds{ClassifierKind::logreg, ClassifierKind::mlp,
                                               ClassifierKind::random_forest,
                                               ClassifierKind::gradient_boosting};

TEST(LogReg, SeparableBlobsFitPerfectly) {
  const auto d = blobs(200, 1.0, 1);
  const auto m = train(ClassifierSpec::defaults(ClassifierKind::logreg), d);
  EXPECT_EQ(accuracy(m, d), 1.0);
}

TEST(LogReg, ZeroModelIsUniform) {
  const auto m = constant_logreg({0.5, 0.5}, 3);
  const auto p = m.predict_proba(MatrixD::Random(5, 3));
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_DOUBLE_EQ(p.data()[i], 0.5);
}

TEST(LogReg, ShiftingAllScoresLeavesProbabilities) {
  const auto d = three_class(150, 2);
  const auto m = train(ClassifierSpec::defaults(ClassifierKind::logreg), d);
  auto s = std::get<LogRegState>(m.state());
  s.bias.array() += 3.7;
  const Model shifted(s, m.class_names(), m.num_features());
  EXPECT_TRUE(shifted.predict_proba(d.features).isApprox(m.predict_proba(d.features), 1e-12));
}

TEST(LogReg, ObjectiveGradientMatchesFiniteDifferences) {
  const auto d = three_class(40, 3);
  auto rng = make_rng(4);
  MatrixD w(3, 4);
  VectorD b(3);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = uniform(rng, -1, 1);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = uniform(rng, -1, 1);
  MatrixD gw;
  VectorD gb;
  logreg::objective(d.features, d.labels, w, b, 1.0, &gw, &gb);
  double worst = 0;
  const auto rel = [](double a, double n) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6});
  };
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double orig = w.data()[i];
    w.data()[i] = orig + 1e-5;
    const double up = logreg::objective(d.features, d.labels, w, b, 1.0, nullptr, nullptr);
    w.data()[i] = orig - 1e-5;
    const double down = logreg::objective(d.features, d.labels, w, b, 1.0, nullptr, nullptr);
    w.data()[i] = orig;
    worst = std::max(worst, rel(gw.data()[i], (up - down) / 2e-5));
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double orig = b(i);
    b(i) = orig + 1e-5;
    const double up = logreg::objective(d.features, d.labels, w, b, 1.0, nullptr, nullptr);
    b(i) = orig - 1e-5;
    const double down = logreg::objective(d.features, d.labels, w, b, 1.0, nullptr, nullptr);
    b(i) = orig;
    worst = std::max(worst, rel(gb(i), (up - down) / 2e-5));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Mlp, LossGradientMatchesFiniteDifferences) {
  const auto d = three_class(30, 5);
  auto rng = make_rng(6);
  MlpWeights w{MatrixD(4, 7), VectorD(7), MatrixD(7, 3), VectorD(3)};
  for (auto* m : {&w.w1, &w.w2})
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = uniform(rng, -1, 1);
  for (auto* v : {&w.b1, &w.b2})
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = uniform(rng, -0.5, 0.5);
  MlpWeights g;
  mlp::loss(w, d.features, d.labels, &g);
  double worst = 0;
  const auto sweep = [&](double* p, const double* grad, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double orig = p[i];
      p[i] = orig + 1e-5;
      const double up = mlp::loss(w, d.features, d.labels, nullptr);
      p[i] = orig - 1e-5;
      const double down = mlp::loss(w, d.features, d.labels, nullptr);
      p[i] = orig;
      const double num = (up - down) / 2e-5;
      worst = std::max(worst, std::abs(num - grad[i]) /
                                  std::max({std::abs(num), std::abs(grad[i]), 1e-6}));
    }
  };
  sweep(w.w1.data(), g.w1.data(), w.w1.size());
  sweep(w.b1.data(), g.b1.data(), w.b1.size());
  sweep(w.w2.data(), g.w2.data(), w.w2.size());
  sweep(w.b2.data(), g.b2.data(), w.b2.size());
  EXPECT_LT(worst, 1e-4);
}

TEST(Mlp, LearnsThreeClassData) {
  const auto d = three_class(300, 7);
  const auto m = train(ClassifierSpec::defaults(ClassifierKind::mlp), d);
  EXPECT_GT(accuracy(m, d), 0.7);
  const auto& s = std::get<MlpState>(m.state());
  EXPECT_FALSE(s.loss_curve.empty());
}

TEST(Forest, PureTreesFitConsistentData) {
  auto rng = make_rng(8);
  LabeledMatrix d{MatrixD(50, 3), {}, kAB};
  for (Eigen::Index i = 0; i < 50; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) d.features(i, j) = uniform(rng, -1, 1);
    d.labels.push_back(uniform01(rng) < 0.5 ? 0 : 1);  // arbitrary but consistent labels
  }
  EXPECT_EQ(accuracy(train(ClassifierSpec::defaults(ClassifierKind::random_forest), d), d), 1.0);
  auto spec = ClassifierSpec::defaults(ClassifierKind::random_forest);
  std::get<ForestParams>(spec.hyper).bootstrap = false;
  EXPECT_EQ(accuracy(train(spec, d), d), 1.0);
}

TEST(Forest, SinglePureLeafIsOneHot) {
  LabeledMatrix d{MatrixD::Random(6, 2), {1, 1, 1, 1, 1, 0}, kAB};
  Tree t;
  t.feature = {-1};
  t.threshold = {0};
  t.left = {-1};
  t.right = {-1};
  t.value = MatrixD(1, 2);
  t.value << 0, 1;
  const Model m(ForestState{{t}}, kAB, 2);
  const auto p = m.predict_proba(d.features);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_EQ(p(i, 0), 0.0);
    EXPECT_EQ(p(i, 1), 1.0);
  }
}

TEST(Forest, OneTreeWithoutBootstrapEqualsSingleTree) {
  const auto d = three_class(120, 9);
  auto spec = ClassifierSpec::defaults(ClassifierKind::random_forest, 77);
  auto& fp = std::get<ForestParams>(spec.hyper);
  fp.n_trees = 1;
  fp.bootstrap = false;
  const auto forest = train(spec, d);
  std::vector<std::size_t> all(d.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto rng = make_rng(77, 1);
  const auto tree = trees::grow_classifier(d.features, d.labels, 3, all, fp, rng());
  const Model single(ForestState{{tree}}, kABC, 4);
  const auto probe = three_class(60, 10).features;
  EXPECT_EQ(forest.predict(probe), single.predict(probe));
}

TEST(Boosting, TrainingLossNonIncreasing) {
  for (const auto& d : {three_class(200, 11), blobs(100, 0.2, 12)}) {
    const auto m = train(ClassifierSpec::defaults(ClassifierKind::gradient_boosting), d);
    const auto& loss = std::get<BoostingState>(m.state()).train_loss;
    ASSERT_EQ(loss.size(), 101u);
    for (std::size_t i = 1; i < loss.size(); ++i) EXPECT_LE(loss[i], loss[i - 1] + 1e-12);
  }
}

TEST(AllKinds, ProbabilitiesAreDistributions) {
  const auto d = three_class(150, 13);
  const auto probe = three_class(40, 14).features;
  for (const auto k : kKinds) {
    const auto m = train(fast_spec(k), d);
    expect_rows_are_distributions(m.predict_proba(probe));
  }
}

TEST(AllKinds, DeterministicUnderSeed) {
  const auto d = three_class(150, 15);
  const auto probe = three_class(40, 16).features;
  for (const auto k : kKinds) {
    const auto a = train(fast_spec(k), d), b = train(fast_spec(k), d);
    EXPECT_EQ(a.predict_proba(probe), b.predict_proba(probe)) << to_string(k);
  }
}

TEST(AllKinds, DimensionMismatchRejected) {
  const auto d = three_class(60, 17);
  for (const auto k : kKinds) {
    const auto m = train(fast_spec(k), d);
    try {
      m.predict_proba(MatrixD::Zero(2, 3));
      ADD_FAILURE() << "no error for " << to_string(k);
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::dimension);
    }
  }
}

TEST(Train, RejectsSingleClassAndNonFinite) {
  LabeledMatrix one{MatrixD::Random(5, 2), {1, 1, 1, 1, 1}, kAB};
  EXPECT_THROW(train(ClassifierSpec::defaults(ClassifierKind::logreg), one), Error);
  auto bad = blobs(10, 1, 18);
  bad.features(3, 1) = std::nan("");
  EXPECT_THROW(train(ClassifierSpec::defaults(ClassifierKind::logreg), bad), Error);
}

TEST(SoftVote, MeanOfMembers) {
  const MatrixD x = MatrixD::Zero(3, 2);
  const std::vector<Model> opposite{constant_logreg({1 - 1e-300, 1e-300}, 2),
                                    constant_logreg({1e-300, 1 - 1e-300}, 2)};
  const auto v = soft_vote(opposite, x);
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(v(i, 0), 0.5, 1e-12);
    EXPECT_NEAR(v(i, 1), 0.5, 1e-12);
  }
  const std::vector<Model> three{constant_logreg({0.8, 0.2}, 2), constant_logreg({0.6, 0.4}, 2),
                                 constant_logreg({0.4, 0.6}, 2)};
  const auto w = soft_vote(three, x);
  EXPECT_NEAR(w(0, 0), 0.6, 1e-12);
  EXPECT_NEAR(w(0, 1), 0.4, 1e-12);
}

TEST(SoftVote, IdenticalMembersAreNoOp) {
  const auto d = three_class(100, 19);
  const auto m = train(ClassifierSpec::defaults(ClassifierKind::logreg), d);
  const std::vector<Model> same{m, m, m};
  EXPECT_TRUE(soft_vote(same, d.features).isApprox(m.predict_proba(d.features), 1e-15));
}

TEST(SoftVote, ClassMismatchRejected) {
  const std::vector<Model> mixed{constant_logreg({0.5, 0.5}, 2),
                                 constant_logreg({0.2, 0.3, 0.5}, 2)};
  EXPECT_THROW(soft_vote(mixed, MatrixD::Zero(1, 2)), Error);
}

TEST(Stacking, AtLeastAsGoodAsMemberOnHeldOut) {
  const auto all = blobs(300, 0.5, 20);
  std::vector<std::size_t> tr, te;
  for (std::size_t i = 0; i < all.rows(); ++i) (i < 200 ? tr : te).push_back(i);
  const auto train_set = all.subset(tr), test_set = all.subset(te);
  const std::vector<ClassifierSpec> specs{ClassifierSpec::defaults(ClassifierKind::logreg)};
  const auto stacked = train_stacked(specs, train_set, 2, 1);
  const auto member = train(specs[0], train_set);
  EXPECT_GE(accuracy(stacked, test_set), accuracy(member, test_set));
}

TEST(Stacking, FoldMissingClassIsError) {
  LabeledMatrix d{MatrixD::Random(4, 2), {0, 0, 0, 1}, kAB};
  const std::vector<ClassifierSpec> specs{ClassifierSpec::defaults(ClassifierKind::logreg)};
  try {
    train_stacked(specs, d, 2, 1);
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::data);
    EXPECT_NE(std::string(e.what()).find("fold"), std::string::npos);
  }
}

TEST(Stacking, DeterministicMetaWeights) {
  const auto d = three_class(150, 21);
  const std::vector<ClassifierSpec> specs{fast_spec(ClassifierKind::logreg),
                                          fast_spec(ClassifierKind::random_forest)};
  const auto a = train_stacked(specs, d, 3, 5), b = train_stacked(specs, d, 3, 5);
  const auto& ma = std::get<LogRegState>(std::get<StackState>(a.state()).meta->state());
  const auto& mb = std::get<LogRegState>(std::get<StackState>(b.state()).meta->state());
  EXPECT_EQ(ma.weights, mb.weights);
  EXPECT_EQ(ma.bias, mb.bias);
}

TEST(StratifiedFolds, EveryFoldHasEveryClass) {
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);
  const auto folds = stratified_folds(labels, 2, 5, 3);
  for (int f = 0; f < 5; ++f) {
    std::array<int, 2> seen{};
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (folds[i] == f) ++seen[static_cast<std::size_t>(labels[i])];
    EXPECT_GT(seen[0], 0);
    EXPECT_GT(seen[1], 0);
  }
}

TEST(Persistence, EveryKindRoundTrips) {
  const auto d = three_class(120, 22);
  const auto probe = three_class(30, 23).features;
  std::vector<Model> models;
  for (const auto k : kKinds) models.push_back(train(fast_spec(k), d));
  models.push_back(make_vote({models[0], models[1], models[2]}));
  const std::vector<ClassifierSpec> specs{fast_spec(ClassifierKind::logreg),
                                          fast_spec(ClassifierKind::gradient_boosting)};
  models.push_back(train_stacked(specs, d, 3, 9));
  for (const auto& m : models) {
    const auto dir = testing::fresh_dir("classic_" + std::string(m.kind_name()));
    save_model(m, dir, Provenance{"h", 42, "v"});
    const auto back = load_model(dir);
    EXPECT_EQ(back.kind_name(), m.kind_name());
    EXPECT_EQ(back.predict_proba(probe), m.predict_proba(probe)) << m.kind_name();
  }
}

TEST(Spec, JsonRoundTripAndValidation) {
  for (const auto k : kKinds) {
    const auto s = fast_spec(k, 9);
    EXPECT_EQ(ClassifierSpec::from_json(s.to_json()).to_json(), s.to_json());
  }
  auto bad = ClassifierSpec::defaults(ClassifierKind::mlp);
  std::get<MlpParams>(bad.hyper).hidden = 0;
  EXPECT_THROW(bad.validate(), Error);
}

}  // namespace
}  // namespace olid
