#include "swest/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace swest {

EmpiricalMeasure load_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SwError(ErrorCode::IoError, "cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string field =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      std::size_t consumed = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &consumed);
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << path << " row " << line_no << ": cannot parse '" << field << "' as a number";
        throw SwError(ErrorCode::ParseError, msg.str());
      }
      while (consumed < field.size() && std::isspace(static_cast<unsigned char>(field[consumed])))
        ++consumed;
      if (consumed != field.size()) {
        std::ostringstream msg;
        msg << path << " row " << line_no << ": trailing characters in '" << field << "'";
        throw SwError(ErrorCode::ParseError, msg.str());
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << path << " row " << line_no << ": expected " << rows.front().size()
          << " columns, found " << row.size();
      throw SwError(ErrorCode::ParseError, msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SwError(ErrorCode::EmptyInput, path + " contains no data rows");

  Eigen::MatrixXd points(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  try {
    return EmpiricalMeasure(std::move(points));
  } catch (const SwError& err) {
    if (err.code() == ErrorCode::NonFiniteInput)
      throw SwError(ErrorCode::NonFiniteInput, path + ": " + err.what());
    throw;
  }
}

void save_measure_csv(const EmpiricalMeasure& measure, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SwError(ErrorCode::IoError, "cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < measure.size(); ++i) {
    for (Eigen::Index j = 0; j < measure.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", measure.points()(i, j));
      out << buf << (j + 1 < measure.dim() ? "," : "");
    }
    out << '\n';
  }
}

}  // namespace swest
