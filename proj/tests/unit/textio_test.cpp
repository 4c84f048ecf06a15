#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "qsem/errors.hpp"
#include "qsem/textio.hpp"

namespace qsem::textio {
namespace {

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(1.0), "1.0");
  EXPECT_EQ(format_real(0.0), "0.0");
  EXPECT_EQ(format_real(-2.0), "-2.0");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(1e300), "1e+300");
  for (double x : {1.0 / 3.0, std::sqrt(2.0), 5e-324, 1.7976931348623157e308, -0.0625}) {
    EXPECT_EQ(parse_real(format_real(x)), x);
  }
}

TEST(Complex, FormatAndParse) {
  EXPECT_EQ(format_complex({1.5, -2}), "1.5-2.0i");
  EXPECT_EQ(format_complex({0, 1}), "0.0+1.0i");
  EXPECT_EQ(parse_complex("1.5-2i"), Complex(1.5, -2));
  EXPECT_EQ(parse_complex("-3"), Complex(-3, 0));
  EXPECT_EQ(parse_complex("2i"), Complex(0, 2));
  EXPECT_EQ(parse_complex("1e-3+4e+2i"), Complex(1e-3, 4e2));
  const Complex z(1.0 / 3, -std::sqrt(5.0));
  EXPECT_EQ(parse_complex(format_complex(z)), z);
  EXPECT_THROW(parse_complex("abc"), ParseError);
}

TEST(ParseReal, Errors) {
  EXPECT_EQ(parse_real(" +2.5 "), 2.5);
  EXPECT_THROW(parse_real(""), ParseError);
  EXPECT_THROW(parse_real("1.5x"), ParseError);
}

TEST(Vectors, ReadFile) {
  std::istringstream in("# header\nx\t1,0,-2\n\ny\t2, -1, 3\n");
  const auto vs = read_vectors<Real>(in);
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_EQ(vs[1].name, "y");
  EXPECT_EQ(vs[1].coords, (RealVector(3) << 2, -1, 3).finished());
  EXPECT_EQ(format_vector<Real>(vs[0].coords), "1.0,0.0,-2.0");
}

TEST(Vectors, Errors) {
  std::istringstream mixed("a\t1,2\nb\t1,2,3\n");
  EXPECT_THROW(read_vectors<Real>(mixed), DimensionError);
  std::istringstream no_tab("a 1,2\n");
  EXPECT_THROW(read_vectors<Real>(no_tab), ParseError);
  std::istringstream bad("a\t1,x\n");
  EXPECT_THROW(read_vectors<Real>(bad), ParseError);
}

TEST(Vectors, ComplexCoordinates) {
  std::istringstream in("z\t1+1i,0-1i\n");
  const auto vs = read_vectors<Complex>(in);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].coords(1), Complex(0, -1));
}

TEST(Split, KeepsEmptyFields) {
  const auto f = split("a\t\tb", '\t');
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[1], "");
}

}  // namespace
}  // namespace qsem::textio
