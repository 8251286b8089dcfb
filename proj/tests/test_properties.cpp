#include "properties.hpp"

#include <gtest/gtest.h>

namespace afckf::test {
void PrintTo(const PropertyCheck& check, std::ostream* os) { *os << check.name; }

namespace {

class Invariant : public ::testing::TestWithParam<PropertyCheck> {};

TEST_P(Invariant, Holds) {
  const PropertyResult result = GetParam().run(20260419);
  EXPECT_TRUE(result.passed) << result.name << ": " << result.detail;
  EXPECT_GE(result.cases, 1);
}

INSTANTIATE_TEST_SUITE_P(All, Invariant, ::testing::ValuesIn(all_property_checks()),
                         [](const auto& info) { return info.param.name; });

}  // namespace
}  // namespace afckf::test
