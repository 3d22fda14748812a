#pragma once

#include <string>

#include "swest/measures.hpp"

namespace swest {

// Headerless CSV, one sample per row, d comma-separated decimal floats.
// Parse failures name the offending row (1-based).
EmpiricalMeasure load_measure_csv(const std::string& path);

void save_measure_csv(const EmpiricalMeasure& measure, const std::string& path);

}  // namespace swest
