#include "radiomap/csv.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "radiomap/errors.hpp"

namespace radiomap {

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": malformed number at line " + std::to_string(line_no));
  }
}

}  // namespace

void write_measurements_csv(const std::string& path, const std::vector<Measurement>& ms) {
  std::string out = "time_index,x,y,path_loss_db\n";
  char buf[160];
  for (const auto& m : ms) {
    // %.17g round-trips doubles, so import reproduces the stream exactly.
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%.17g,%.17g,%.17g\n", m.time_index,
                  m.position.x, m.position.y, m.path_loss_db);
    out += buf;
  }
  write_text_file(path, out);
}

std::vector<Measurement> read_measurements_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open measurement stream: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "time_index,x,y,path_loss_db") {
    throw IoError(path + ": expected header 'time_index,x,y,path_loss_db'");
  }
  std::vector<Measurement> ms;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw IoError(path + ": expected 4 fields at line " + std::to_string(line_no));
    }
    Measurement m;
    try {
      m.time_index = std::stoll(fields[0]);
    } catch (const std::exception&) {
      throw IoError(path + ": malformed time_index at line " + std::to_string(line_no));
    }
    m.position.x = parse_double(fields[1], path, line_no);
    m.position.y = parse_double(fields[2], path, line_no);
    m.path_loss_db = parse_double(fields[3], path, line_no);
    if (!is_finite(m.position) || !std::isfinite(m.path_loss_db) || m.path_loss_db < 0.0) {
      throw IoError(path + ": invalid measurement at line " + std::to_string(line_no));
    }
    if (!ms.empty() && m.time_index <= ms.back().time_index) {
      throw IoError(path + ": time_index must be strictly increasing (line " +
                    std::to_string(line_no) + ")");
    }
    ms.push_back(m);
  }
  return ms;
}

void write_apsm_diagnostics_csv(const std::string& path,
                                const std::vector<StepDiagnostics>& d) {
  std::string out = "step,residual_before,residual_after,dict_size\n";
  char buf[160];
  for (const auto& row : d) {
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%.9g,%.9g,%zu\n", row.step,
                  row.residual_before, row.residual_after, row.dict_size);
    out += buf;
  }
  write_text_file(path, out);
}

void write_mk_diagnostics_csv(const std::string& path,
                              const std::vector<MkStepDiagnostics>& d) {
  std::string out =
      "step,residual_before,residual_after,dict_size,zero_row_count,zero_col_count\n";
  char buf[200];
  for (const auto& row : d) {
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%.9g,%.9g,%zu,%zu,%zu\n", row.step,
                  row.residual_before, row.residual_after, row.dict_size,
                  row.zero_row_count, row.zero_col_count);
    out += buf;
  }
  write_text_file(path, out);
}

void write_eval_grid_csv(const std::string& path, const EvalReport& report) {
  std::string out = "x,y,truth_db,estimate_db,abs_err_db\n";
  for (std::size_t iy = 0; iy < report.grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < report.grid.nx; ++ix) {
      const Position p = cell_center(report.grid, ix, iy);
      const Eigen::Index r = static_cast<Eigen::Index>(iy);
      const Eigen::Index c = static_cast<Eigen::Index>(ix);
      out += fmt("%.10g", p.x) + "," + fmt("%.10g", p.y) + "," +
             fmt("%.10g", report.truth_grid(r, c)) + "," +
             fmt("%.10g", report.estimate_grid(r, c)) + "," +
             fmt("%.10g", report.abs_err_grid(r, c)) + "\n";
    }
  }
  write_text_file(path, out);
}

void write_map_grid_csv(const std::string& path, const GridSpec& grid,
                        const Eigen::MatrixXd& values) {
  if (values.rows() != static_cast<Eigen::Index>(grid.ny) ||
      values.cols() != static_cast<Eigen::Index>(grid.nx)) {
    throw DimensionError("grid value matrix does not match the grid spec");
  }
  std::string out = "x,y,path_loss_db\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const Position p = cell_center(grid, ix, iy);
      out += fmt("%.10g", p.x) + "," + fmt("%.10g", p.y) + "," +
             fmt("%.10g", values(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix))) +
             "\n";
    }
  }
  write_text_file(path, out);
}

}  // namespace radiomap
