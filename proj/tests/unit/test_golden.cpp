#include "catch_amalgamated.hpp"

#include "critval/arch/arch.hpp"

#include <fstream>
#include <sstream>

TEST_CASE("critical table matches the golden file") {
  std::ifstream in(std::string(CRITVAL_GOLDEN_DIR) + "/critical_table_k3-12_n1-4.txt");
  REQUIRE(in.good());
  std::ostringstream want;
  want << in.rdbuf();
  REQUIRE(critval::arch::critical_table_text(3, 12, 1, 4) == want.str());
}

TEST_CASE("refused rows are printed in place") {
  std::string t = critval::arch::critical_table_text(2, 2, 1, 1);
  REQUIRE(t.find("k >= 4") != std::string::npos);
}
