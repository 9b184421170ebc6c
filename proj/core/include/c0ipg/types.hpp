#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace c0ipg {

using Real = double;
using Complex = std::complex<double>;

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

struct Point {
    Real x = 0.0;
    Real y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(Real s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point a, Point b) = default;
};

inline Real dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline Real cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline Real norm(Point a) { return std::hypot(a.x, a.y); }

/// Raised when a requested mesh size does not tile the domain exactly.
class SizingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when problem data violates the assumptions of the discrete scheme.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a sparse factorization or the eigensolver fails.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FactorizationError : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace c0ipg
