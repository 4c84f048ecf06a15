#pragma once

// Line-oriented text helpers shared by the file formats: exact real/complex
// number formatting and the "name<TAB>c1,c2,..." vectors file.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qsem/numkernel.hpp"

namespace qsem::textio {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Shortest representation that parses back to the same double. Integral
// values keep a trailing ".0" so they read as reals.
std::string format_real(double x);
// "re+imi" / "re-imi"; both parts formatted with format_real.
std::string format_complex(Complex z);

template <Field F>
std::string format_scalar(F x) {
  if constexpr (std::same_as<F, Real>) {
    return format_real(x);
  } else {
    return format_complex(x);
  }
}

double parse_real(std::string_view s);
// Accepts a plain real, "a+bi", "a-bi" or "bi".
Complex parse_complex(std::string_view s);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);

template <Field F>
struct NamedVector {
  std::string name;
  Vector<F> coords;
};

// Parses "name<TAB>c1,c2,..." lines. Blank lines and lines starting with '#'
// are skipped. All vectors must share one dimension.
template <Field F>
std::vector<NamedVector<F>> read_vectors(std::istream& in);

template <Field F>
std::string format_vector(const Vector<F>& v);

}  // namespace qsem::textio
