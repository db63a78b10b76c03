#pragma once

#include <string>
#include <vector>

#include "opalg/algebra.hpp"
#include "opalg/arbitrage.hpp"
#include "opalg/jump.hpp"
#include "opalg/qms.hpp"
#include "opalg/states.hpp"
#include "opalg/types.hpp"

namespace opalg {

// Matrices travel as row-major nested arrays of [re, im] pairs. Parsers are
// strict: unknown keys are rejected, and errors carry a JSON-path context.

std::string matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const std::string& text);

std::string model_to_json(const AlgebraModel& model);
AlgebraModel model_from_json(const std::string& text);

std::string state_to_json(const DensityState& state);
DensityState state_from_json(const std::string& text);

std::string gains_to_json(const GainsCone& cone);
GainsCone gains_from_json(const std::string& text);

std::string jump_to_json(const JumpModel& model);
JumpModel jump_from_json(const std::string& text);

std::string gksl_to_json(const GkslSystem& system, double r);
std::pair<GkslSystem, double> gksl_from_json(const std::string& text);

std::string claim_to_json(const Matrix& claim);
Matrix claim_from_json(const std::string& text);

// CSV with the pinned header "eigenvalue,probability".
std::string born_to_csv(const BornDistribution& distribution);

std::string read_file(const std::string& path);
// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Round-trip-safe decimal formatting (17 significant digits).
std::string format_double(double v);

}  // namespace opalg
