#pragma once

#include <stdexcept>
#include <string>

namespace lqg {

struct InvalidMesh : std::runtime_error {
    explicit InvalidMesh(const std::string& what) : std::runtime_error(what) {}
};

// Mesh file parse failure; carries the 1-based line number of the offending line.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line_no)
        : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    int line;
};

struct DegenerateElement : std::runtime_error {
    explicit DegenerateElement(const std::string& what) : std::runtime_error(what) {}
};

struct Unsupported : std::runtime_error {
    explicit Unsupported(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfDomain : std::runtime_error {
    explicit OutOfDomain(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidProblem : std::runtime_error {
    explicit InvalidProblem(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a Newton stage exhausts its iteration budget; identifies the stage.
struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& what, double q_stage, double eps_stage)
        : std::runtime_error(what), q(q_stage), eps(eps_stage) {}
    double q;
    double eps;
};

}  // namespace lqg
