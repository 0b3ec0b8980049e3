#include <gtest/gtest.h>

#include <map>

#include "conformance_cases.hpp"

using namespace pairfuzz;
using conformance::Case;
using conformance::cases;

namespace {

std::string case_name(const testing::TestParamInfo<Case>& info) {
  return "m" + std::to_string(info.param.id) + "_case" + std::to_string(info.index);
}

class Conformance : public testing::TestWithParam<Case> {};

}  // namespace

TEST_P(Conformance, ByteExact) {
  const Case& c = GetParam();
  ScriptedRng rng(c.script);
  const MutationContext ctx = conformance::make_ctx(c.ctx, c.max);
  Bytes buf = c.in;
  const MutatorId eff = mutate_in_place(MutatorId(c.id), buf, ctx, rng);
  EXPECT_EQ(buf, c.out);
  EXPECT_EQ(eff.value(), c.effective);
  EXPECT_TRUE(rng.exhausted()) << "not every scripted draw was used";
  EXPECT_EQ(conformance::run_case(c), "");
}

INSTANTIATE_TEST_SUITE_P(AllMutators, Conformance, testing::ValuesIn(cases()), case_name);

TEST(ConformanceTable, EveryMutatorHasBoundaryCases) {
  std::map<int, int> per_id, len1, at_max;
  for (const auto& c : cases()) {
    ++per_id[c.id];
    if (c.in.size() == 1) ++len1[c.id];
    if (c.in.size() == c.max) ++at_max[c.id];
  }
  for (int id = 1; id <= kMutatorCount; ++id) {
    EXPECT_GE(per_id[id], 3) << "mutator " << id;
    EXPECT_GE(len1[id], 1) << "mutator " << id << " lacks a length-1 case";
    EXPECT_GE(at_max[id], 1) << "mutator " << id << " lacks a case at the size limit";
  }
}
