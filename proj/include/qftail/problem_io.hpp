#pragma once

#include "qftail/canonical.hpp"

#include <filesystem>
#include <istream>
#include <ostream>

namespace qftail {

/// Plain-text problem: a line with N, then N rows of sigma_x, N rows of sigma and one
/// row of mu, all whitespace-separated decimals. The threshold is supplied separately.
/// Throws Error(ParseError) on malformed input; the result is not validated.
QuadFormProblem read_problem(std::istream& in, double gamma0);
QuadFormProblem read_problem_file(const std::filesystem::path& path, double gamma0);

void write_problem(std::ostream& out, const QuadFormProblem& p);

}  // namespace qftail
