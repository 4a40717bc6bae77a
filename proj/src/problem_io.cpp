#include "qftail/problem_io.hpp"

#include "qftail/error.hpp"

#include <fmt/core.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qftail {

namespace {

// Next non-blank line split into doubles.
std::vector<double> read_row(std::istream& in, const char* what) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        std::vector<double> row;
        std::string token;
        while (ss >> token) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw Error(Errc::ParseError, fmt::format("invalid number '{}' in {}", token, what));
            }
            row.push_back(v);
        }
        return row;
    }
    throw Error(Errc::ParseError, fmt::format("unexpected end of input while reading {}", what));
}

void read_matrix(std::istream& in, Eigen::MatrixXd& m, Eigen::Index n, const char* what) {
    m.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = read_row(in, what);
        if (static_cast<Eigen::Index>(row.size()) != n) {
            throw Error(Errc::ParseError,
                        fmt::format("{} row {} has {} entries, expected {}", what, i + 1, row.size(), n));
        }
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
}

}  // namespace

QuadFormProblem read_problem(std::istream& in, double gamma0) {
    const auto header = read_row(in, "dimension line");
    if (header.size() != 1 || header[0] < 1 || header[0] != static_cast<double>(static_cast<long>(header[0]))) {
        throw Error(Errc::ParseError, "first line must hold a single positive integer N");
    }
    const auto n = static_cast<Eigen::Index>(header[0]);
    QuadFormProblem p;
    p.gamma0 = gamma0;
    read_matrix(in, p.sigma_x, n, "sigma_x");
    read_matrix(in, p.sigma, n, "sigma");
    const auto mu = read_row(in, "mu");
    if (static_cast<Eigen::Index>(mu.size()) != n) {
        throw Error(Errc::ParseError, fmt::format("mu has {} entries, expected {}", mu.size(), n));
    }
    p.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), n);
    std::string rest;
    while (in >> rest) {
        throw Error(Errc::ParseError, fmt::format("trailing content '{}' after mu", rest));
    }
    return p;
}

QuadFormProblem read_problem_file(const std::filesystem::path& path, double gamma0) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, fmt::format("cannot open problem file '{}'", path.string()));
    return read_problem(in, gamma0);
}

void write_problem(std::ostream& out, const QuadFormProblem& p) {
    const Eigen::Index n = p.mu.size();
    out << n << '\n';
    auto row = [&](auto&& get) {
        for (Eigen::Index j = 0; j < n; ++j) out << (j ? " " : "") << fmt::format("{:.17g}", get(j));
        out << '\n';
    };
    for (Eigen::Index i = 0; i < n; ++i) row([&](Eigen::Index j) { return p.sigma_x(i, j); });
    for (Eigen::Index i = 0; i < n; ++i) row([&](Eigen::Index j) { return p.sigma(i, j); });
    row([&](Eigen::Index j) { return p.mu[j]; });
}

}  // namespace qftail
