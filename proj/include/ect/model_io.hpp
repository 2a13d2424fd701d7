#pragma once

// Versioned text container for trained reduction models. Doubles are written
// with 17 significant digits, so save/load round-trips exactly.

#include <iosfwd>
#include <string>

#include "ect/reductions.hpp"

namespace ect {

inline constexpr int kModelFormatVersion = 1;

void save_model(const ReductionModel& model, std::ostream& out);
ReductionModel load_model(std::istream& in);  // throws FormatError

void save_model_file(const ReductionModel& model, const std::string& path);
ReductionModel load_model_file(const std::string& path);

}  // namespace ect
