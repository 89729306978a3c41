#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

namespace ag = animgram;
using ag::DynamicKind;
using ag::RelationKind;
using ag::testing::catalog;

namespace {

double speed(const ag::ParseTree& t, ag::NodeId n) { return std::get<double>(t.find(ag::velocity_value_path(n))->value); }
ag::Vec3 heading(const ag::ParseTree& t, ag::NodeId n) {
  return ag::normalized(std::get<ag::Vec3>(t.find(ag::velocity_direction_path(n))->value));
}
ag::Vec3 position(const ag::ParseTree& t, ag::NodeId n) { return std::get<ag::Vec3>(t.find(ag::position_path(n))->value); }
double elevation_deg(const ag::Vec3& d) { return ag::rad_to_deg(std::asin(std::clamp(d.y, -1.0, 1.0))); }
double max_extent(const ag::ParseTree& t, ag::NodeId n) {
  const ag::Vec3 e = *ag::object_extents(t.node(n), catalog());
  return std::max({e.x, e.y, e.z});
}

// Checks the final tree against what each kind means, independently of the
// rows the builder produced.
void expect_kind_semantics(const ag::ParseTree& t, const ag::DynamicModel& m, const ag::DynamicsConfig& cfg) {
  const double tol = 1e-9;
  const ag::NodeId s = m.subject;
  const ag::Vec3 d = heading(t, s);
  switch (m.kind) {
    case DynamicKind::kJump:
      EXPECT_LE(ag::rad_to_deg(ag::angle_between(d, ag::kUp)), cfg.theta0_deg + tol);
      EXPECT_GE(speed(t, s), cfg.v_min);
      break;
    case DynamicKind::kDrop:
      EXPECT_LE(ag::rad_to_deg(ag::angle_between(d, ag::kDown)), cfg.theta0_deg + tol);
      EXPECT_LE(speed(t, s), cfg.v_small);
      EXPECT_GE(position(t, s).y, cfg.sky_factor * max_extent(t, s) - tol);
      break;
    case DynamicKind::kFly:
      EXPECT_LE(std::abs(elevation_deg(d)), cfg.theta0_deg + tol);
      EXPECT_GE(speed(t, s), cfg.v_large);
      EXPECT_GE(position(t, s).y, cfg.sky_factor * max_extent(t, s) - tol);
      break;
    case DynamicKind::kThrow:
      if (*m.throw_variant == ag::ThrowVariant::kUp) EXPECT_GT(d.y, 0.0);
      else EXPECT_LT(d.y, 0.0);
      break;
    case DynamicKind::kSlide:
      EXPECT_LE(std::abs(elevation_deg(d)), cfg.theta0_deg + tol);
      break;
    case DynamicKind::kPush: {
      EXPECT_GE(speed(t, s), cfg.v_large);
      EXPECT_LE(speed(t, *m.objective), cfg.v_small);
      const ag::Vec3 toward = position(t, *m.objective) - position(t, s);
      EXPECT_LE(ag::rad_to_deg(ag::angle_between(d, toward)), cfg.theta0_deg + tol);
      break;
    }
    case DynamicKind::kStrike: {
      ASSERT_TRUE(m.contact_point.has_value());
      for (ag::NodeId n : {s, *m.objective}) {
        EXPECT_GE(speed(t, n), cfg.v_large);
        EXPECT_LE(ag::rad_to_deg(ag::angle_between(heading(t, n), *m.contact_point - position(t, n))),
                  cfg.theta0_deg + tol);
      }
      break;
    }
  }
}

}  // namespace

class KindRelation : public ::testing::TestWithParam<std::tuple<DynamicKind, RelationKind>> {};

TEST_P(KindRelation, RowsAreSatisfiableAndMeanWhatTheKindSays) {
  const auto [kind, relation] = GetParam();
  const ag::DynamicsConfig cfg;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ag::ParseTree t = ag::testing::sampled_tree(1000 + seed, 3, 1);
    ag::Rng rng(seed);
    ag::DynamicModel m;
    ASSERT_TRUE(ag::testing::force_model(t, kind, relation, rng, m));
    const auto r = ag::apply_dynamic_model(t, m, catalog(), cfg, rng);
    if (!r.ok()) continue;
    ++ok;
    EXPECT_TRUE(ag::evaluate_all(t, m.constraints).all_satisfied());
    for (const auto& c : m.constraints) EXPECT_NO_THROW(ag::check_well_formed(c));
    expect_kind_semantics(t, m, cfg);
    if (relation == RelationKind::kTo && kind == DynamicKind::kJump) EXPECT_TRUE(m.jump_encoding.has_value());
    if (kind == DynamicKind::kStrike && relation == RelationKind::kTo)
      EXPECT_EQ(*m.contact_point, position(t, *m.relation.target));
  }
  EXPECT_GE(ok, 95);
}

INSTANTIATE_TEST_SUITE_P(
    AllRows, KindRelation,
    ::testing::Combine(::testing::ValuesIn(ag::kAllDynamicKinds),
                       ::testing::Values(RelationKind::kNone, RelationKind::kFrom, RelationKind::kTo)),
    [](const auto& info) {
      return std::string(ag::to_string(std::get<0>(info.param))) + "_" +
             std::string(ag::to_string(std::get<1>(info.param)));
    });

TEST(Dynamics, EligibilityFollowsObjectCounts) {
  std::set<DynamicKind> single, with_collision, two_targets;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    ag::Rng rng(seed);
    single.insert(ag::sample_dynamic_model(ag::build_scene_tree(1, 0), rng).kind);
    with_collision.insert(ag::sample_dynamic_model(ag::build_scene_tree(1, 1), rng).kind);
    two_targets.insert(ag::sample_dynamic_model(ag::build_scene_tree(2, 0), rng).kind);
  }
  EXPECT_EQ(single.size(), 5u);
  EXPECT_FALSE(single.count(DynamicKind::kPush) || single.count(DynamicKind::kStrike));
  EXPECT_TRUE(with_collision.count(DynamicKind::kPush));
  EXPECT_FALSE(with_collision.count(DynamicKind::kStrike));
  EXPECT_EQ(two_targets.size(), 7u);
}

TEST(Dynamics, RolesAreDistinctObjectsWithTheRightKinds) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const ag::ParseTree t = ag::build_scene_tree(2, 2);
    ag::Rng rng(seed);
    ag::DynamicModel m = ag::sample_dynamic_model(t, rng);
    ag::attach_relation(m, t, ag::DynamicsConfig{}, rng);
    EXPECT_EQ(t.node(m.subject).kind, ag::NodeKind::kTargetObject);
    EXPECT_EQ(ag::is_multi_object(m.kind), m.objective.has_value());
    if (m.objective) EXPECT_NE(*m.objective, m.subject);
    if (m.kind == DynamicKind::kStrike) EXPECT_EQ(t.node(*m.objective).kind, ag::NodeKind::kTargetObject);
    EXPECT_EQ(m.kind == DynamicKind::kThrow, m.throw_variant.has_value());
    if (m.relation.kind != RelationKind::kNone) {
      ASSERT_TRUE(m.relation.target.has_value());
      EXPECT_NE(*m.relation.target, m.subject);
      if (m.objective) EXPECT_NE(*m.relation.target, *m.objective);
    }
  }
}

TEST(Dynamics, RelationFrequenciesFollowTheConfig) {
  const ag::ParseTree t = ag::build_scene_tree(3, 0);
  std::map<RelationKind, int> counts;
  const int n = 30000;
  ag::Rng rng(5);
  for (int i = 0; i < n; ++i) {
    ag::DynamicModel m;
    m.kind = DynamicKind::kJump;
    m.subject = t.targets()[0];
    ag::attach_relation(m, t, ag::DynamicsConfig{}, rng);
    ++counts[m.relation.kind];
  }
  // Chi-square, 2 degrees of freedom; 13.8 is the 0.999 quantile.
  const std::pair<RelationKind, double> expected[] = {
      {RelationKind::kNone, 0.4}, {RelationKind::kFrom, 0.3}, {RelationKind::kTo, 0.3}};
  double chi2 = 0.0;
  for (const auto& [k, p] : expected) chi2 += std::pow(counts[k] - n * p, 2) / (n * p);
  EXPECT_LT(chi2, 13.8);
}

TEST(Dynamics, NoRelationWithoutASpareObject) {
  const ag::ParseTree t = ag::build_scene_tree(1, 0);
  ag::Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    ag::DynamicModel m = ag::sample_dynamic_model(t, rng);
    ag::attach_relation(m, t, ag::DynamicsConfig{}, rng);
    EXPECT_EQ(m.relation.kind, RelationKind::kNone);
  }
}

TEST(Dynamics, BadRolesAreRejected) {
  ag::ParseTree t = ag::testing::sampled_tree(3, 1, 1);
  ag::Rng rng(1);
  ag::DynamicModel m;
  m.kind = DynamicKind::kJump;
  m.subject = t.collisions()[0];
  EXPECT_THROW(ag::apply_dynamic_model(t, m, catalog(), {}, rng), ag::Error);
  m.kind = DynamicKind::kPush;
  m.subject = t.targets()[0];
  EXPECT_THROW(ag::apply_dynamic_model(t, m, catalog(), {}, rng), ag::Error);
  m.objective = m.subject;
  EXPECT_THROW(ag::apply_dynamic_model(t, m, catalog(), {}, rng), ag::Error);
}

TEST(Dynamics, CriteriaValuesAreUntouchedByResampling) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto out = ag::generate_scenario(11, seed, {}, catalog());
    if (!out.ok) continue;
    EXPECT_EQ(out.criteria_before, out.criteria_after) << "stream " << seed;
  }
}

TEST(Dynamics, ConfigValidity) {
  ag::DynamicsConfig c;
  EXPECT_TRUE(c.valid());
  c.p_to = 0.5;
  EXPECT_FALSE(c.valid());
  c = {};
  c.v_small = 2.0;
  EXPECT_FALSE(c.valid());
}
