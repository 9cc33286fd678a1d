#include "gsi/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gsi::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return line;
  }
  throw std::invalid_argument("unexpected end of Matrix Market file");
}

}  // namespace

void write_matrix_market(std::ostream& out, const SymmetricSparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.n() << " " << a.n() << " " << a.pattern().size() << "\n";
  out << std::setprecision(17);
  for (const auto& e : a.pattern().entries())
    out << e.row + 1 << " " << e.col + 1 << " " << a.value_or_zero(e.row, e.col) << "\n";
}

SymmetricSparseMatrix read_matrix_market(std::istream& in) {
  std::string banner;
  if (!std::getline(in, banner) || lower(banner).find("%%matrixmarket") != 0)
    throw std::invalid_argument("missing Matrix Market banner");
  const std::string lb = lower(banner);
  if (lb.find("coordinate") == std::string::npos || lb.find("symmetric") == std::string::npos)
    throw std::invalid_argument("expected a 'coordinate real symmetric' matrix");

  std::istringstream sizes(next_data_line(in));
  Index rows = 0, cols = 0;
  long nnz = 0;
  if (!(sizes >> rows >> cols >> nnz) || rows != cols || rows < 1)
    throw std::invalid_argument("bad Matrix Market size line");

  // two passes over the entry list: pattern first, then values
  std::vector<std::tuple<Index, Index, double>> entries;
  entries.reserve(static_cast<size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    std::istringstream entry(next_data_line(in));
    Index i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v))
      throw std::invalid_argument("bad Matrix Market entry on line " + std::to_string(k + 1));
    if (i < j) std::swap(i, j);  // tolerate upper-triangle listings
    if (i < 1 || i > rows || j < 1)
      throw std::invalid_argument("Matrix Market entry out of range");
    entries.emplace_back(i - 1, j - 1, v);
  }
  SparsityPattern pattern(rows);
  for (const auto& [i, j, v] : entries) pattern.insert(i, j);
  SymmetricSparseMatrix a(std::move(pattern));
  for (const auto& [i, j, v] : entries) a.set(i, j, v);
  return a;
}

void write_vector_market(std::ostream& out, const std::vector<double>& v) {
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  out << std::setprecision(17);
  for (double x : v) out << x << "\n";
}

std::vector<double> read_vector_market(std::istream& in) {
  std::string banner;
  if (!std::getline(in, banner) || lower(banner).find("%%matrixmarket") != 0)
    throw std::invalid_argument("missing Matrix Market banner");
  if (lower(banner).find("array") == std::string::npos)
    throw std::invalid_argument("expected an 'array real general' vector");
  std::istringstream sizes(next_data_line(in));
  long rows = 0, cols = 0;
  if (!(sizes >> rows >> cols) || cols != 1 || rows < 1)
    throw std::invalid_argument("expected a single-column vector");
  std::vector<double> v(static_cast<size_t>(rows));
  for (auto& x : v) {
    std::istringstream entry(next_data_line(in));
    if (!(entry >> x)) throw std::invalid_argument("bad vector entry");
  }
  return v;
}

void write_selected_inverse(std::ostream& out, const SelectedInverse& y) {
  out << "N " << y.pattern.n() << "\n";
  out << std::setprecision(17);
  for (const auto& e : y.pattern.entries())
    out << e.row + 1 << " " << e.col + 1 << " " << y.value(e.row, e.col) << "\n";
}

void write_vector_plain(std::ostream& out, const std::vector<double>& v) {
  out << std::setprecision(17);
  for (double x : v) out << x << "\n";
}

std::vector<double> read_vector_plain(std::istream& in) {
  std::vector<double> v;
  double x = 0.0;
  while (in >> x) v.push_back(x);
  return v;
}

void write_trace_csv(std::ostream& out, const mp::ConvergenceTrace& trace) {
  out << "round,err_S,err_L,err_w,err_x,err_y,messages_sent\n";
  out << std::setprecision(17);
  for (const auto& row : trace.rows)
    out << row.round << "," << row.err.s << "," << row.err.l << "," << row.err.w << ","
        << row.err.x << "," << row.err.y << "," << row.messages_sent << "\n";
}

void write_message_log_header(std::ostream& out) { out << "round,from,to,slot,value\n"; }

void write_message_log_row(std::ostream& out, const mp::Message& m) {
  out << m.round << "," << m.from + 1 << "," << m.to + 1 << "," << mp::to_string(m.slot) << ","
      << std::setprecision(17) << m.value << "\n";
}

void write_histogram_csv(std::ostream& out, const std::vector<std::pair<int, long>>& rows) {
  out << "fill_count,frequency\n";
  for (const auto& [fill, freq] : rows) out << fill << "," << freq << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gsi::io
