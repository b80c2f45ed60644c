#include "panelfactor/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "panelfactor/errors.hpp"

namespace panelfactor {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error(ErrorKind::InvalidArgument, "cannot format value");
  return std::string(buf, ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t parse_size(std::string_view text) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::ParseError, "not a non-negative integer: '" + std::string(text) + "'");
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_panel_csv(std::ostream& out, const PanelMatrix& A) {
  out << A.n() << ',' << A.T() << '\n';
  for (std::size_t i = 0; i < A.n(); ++i) {
    for (std::size_t t = 0; t < A.T(); ++t) {
      if (t) out << ',';
      out << format_double(A(i, t));
    }
    out << '\n';
  }
}

void write_panel_csv(const std::filesystem::path& path, const PanelMatrix& A) {
  auto out = open_out(path);
  write_panel_csv(out, A);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

PanelMatrix read_panel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty panel file");
  auto header = split_commas(line);
  if (header.size() != 2) throw Error(ErrorKind::ParseError, "header must be 'n,T'");
  const std::size_t n = parse_size(header[0]);
  const std::size_t T = parse_size(header[1]);
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (auto field : split_commas(line)) row.push_back(parse_double(field));
    rows.push_back(std::move(row));
  }
  return panel_from_rows(n, T, rows);
}

PanelMatrix read_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_panel_csv(in);
}

void write_latents_csv(std::ostream& out, const LatentDraws& lat) {
  out << "kind,index,value\n";
  auto vec = [&](const char* kind, const Eigen::VectorXd& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) out << kind << ',' << k << ',' << format_double(v(k)) << '\n';
  };
  auto mat = [&](const char* kind, const RowMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index t = 0; t < m.cols(); ++t)
        out << kind << ',' << i << ':' << t << ',' << format_double(m(i, t)) << '\n';
  };
  vec("lambda_plus", lat.lambda_plus);
  vec("lambda_x", lat.lambda_x);
  vec("f_plus", lat.f_plus);
  vec("f_x", lat.f_x);
  mat("eps_x", lat.eps_x);
  mat("u", lat.u);
}

void write_latents_csv(const std::filesystem::path& path, const LatentDraws& latents) {
  auto out = open_out(path);
  write_latents_csv(out, latents);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace panelfactor
