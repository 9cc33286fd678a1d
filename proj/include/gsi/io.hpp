#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gsi/mp.hpp"
#include "gsi/solver.hpp"
#include "gsi/sparse_matrix.hpp"

namespace gsi::io {

/// Matrix Market "coordinate real symmetric" with lower-triangle entries.
void write_matrix_market(std::ostream& out, const SymmetricSparseMatrix& a);
SymmetricSparseMatrix read_matrix_market(std::istream& in);

/// Matrix Market "array real general" column vector.
void write_vector_market(std::ostream& out, const std::vector<double>& v);
std::vector<double> read_vector_market(std::istream& in);

/// "N <n>" header then 1-based "i j value" triples in basic order.
void write_selected_inverse(std::ostream& out, const SelectedInverse& y);

/// One value per line.
void write_vector_plain(std::ostream& out, const std::vector<double>& v);
std::vector<double> read_vector_plain(std::istream& in);

/// Trace CSV: round,err_S,err_L,err_w,err_x,err_y,messages_sent.
void write_trace_csv(std::ostream& out, const mp::ConvergenceTrace& trace);

/// Message log CSV: round,from,to,slot,value (1-based ids).
void write_message_log_header(std::ostream& out);
void write_message_log_row(std::ostream& out, const mp::Message& m);

/// Histogram CSV: fill_count,frequency.
void write_histogram_csv(std::ostream& out, const std::vector<std::pair<int, long>>& rows);

std::string read_file(const std::string& path);  // throws std::runtime_error

}  // namespace gsi::io
