#include "randskel/errors.hpp"

#include <utility>

namespace randskel {

FormatError::FormatError(const std::string& what, long line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

RankDeficiencyError::RankDeficiencyError(std::string stage, Index step, const std::string& detail)
    : NumericalError(stage + (step > 0 ? " (step " + std::to_string(step) + ")" : std::string{}) +
                     ": " + detail),
      stage_(std::move(stage)), step_(step) {}

} // namespace randskel
