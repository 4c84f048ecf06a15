#include "qsem/textio.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "qsem/errors.hpp"

namespace qsem::textio {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string format_real(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  std::string s(buf.data(), ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string format_complex(Complex z) {
  std::string out = format_real(z.real());
  const double im = z.imag();
  if (std::signbit(im)) {
    out += format_real(im);
  } else {
    out += '+';
    out += format_real(im);
  }
  out += 'i';
  return out;
}

double parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return x;
}

Complex parse_complex(std::string_view s) {
  s = trim(s);
  if (s.empty() || s.back() != 'i') return {parse_real(s), 0.0};
  s.remove_suffix(1);
  // The imaginary part starts at the last sign that is not an exponent sign.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  if (split_at == std::string_view::npos) return {0.0, parse_real(s)};
  return {parse_real(s.substr(0, split_at)), parse_real(s.substr(split_at))};
}

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

template <Field F>
std::vector<NamedVector<F>> read_vectors(std::istream& in) {
  std::vector<NamedVector<F>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("vectors line " + std::to_string(lineno) + ": missing TAB");
    }
    NamedVector<F> nv;
    nv.name = std::string(trim(std::string_view(line).substr(0, tab)));
    if (nv.name.empty()) {
      throw ParseError("vectors line " + std::to_string(lineno) + ": empty name");
    }
    const auto fields = split(std::string_view(line).substr(tab + 1), ',');
    nv.coords.resize(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t k = 0; k < fields.size(); ++k) {
      try {
        if constexpr (std::same_as<F, Real>) {
          nv.coords(static_cast<Eigen::Index>(k)) = parse_real(fields[k]);
        } else {
          nv.coords(static_cast<Eigen::Index>(k)) = parse_complex(fields[k]);
        }
      } catch (const ParseError& e) {
        throw ParseError("vectors line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (!out.empty() && out.front().coords.size() != nv.coords.size()) {
      throw DimensionError("vectors line " + std::to_string(lineno) +
                           ": dimension differs from earlier vectors");
    }
    out.push_back(std::move(nv));
  }
  return out;
}

template <Field F>
std::string format_vector(const Vector<F>& v) {
  std::string out;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k > 0) out += ',';
    out += format_scalar<F>(v(k));
  }
  return out;
}

template std::vector<NamedVector<Real>> read_vectors<Real>(std::istream&);
template std::vector<NamedVector<Complex>> read_vectors<Complex>(std::istream&);
template std::string format_vector<Real>(const Vector<Real>&);
template std::string format_vector<Complex>(const Vector<Complex>&);

}  // namespace qsem::textio
