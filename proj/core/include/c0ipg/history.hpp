#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "c0ipg/adapt.hpp"

namespace c0ipg {

inline constexpr std::string_view kHistoryHeader =
    "iter,dof,k_re,k_im,err_abs,eta2_primal,eta2_dual,eta2_total,marked,seconds";

/// Writes the convergence history as CSV with 12 significant digits.
/// err_abs = |k - reference| when a reference is given, empty otherwise.
void emit_history(std::ostream& out, const AdaptTrace& trace, std::optional<Complex> reference);
void emit_history(const std::string& path, const AdaptTrace& trace, std::optional<Complex> reference);

struct HistoryRow {
    int iter = 0;
    int dof = 0;
    Complex k;
    std::optional<Real> err_abs;
    Real eta2_primal = 0.0;
    Real eta2_dual = 0.0;
    Real eta2_total = 0.0;
    int marked = 0;
    Real seconds = 0.0;
};

/// Parses a file written by emit_history. Throws std::runtime_error on a
/// header mismatch or malformed row.
std::vector<HistoryRow> parse_history(std::istream& in);

/// Per-element indicator dump: "triangle_id,eta_sq".
void write_indicators(std::ostream& out, const std::vector<Real>& values);
void write_indicators(const std::string& path, const std::vector<Real>& values);

/// Parses "a", "a+bi", "a-bi", "bi" (and "j" in place of "i").
Complex parse_complex(std::string_view text);

}  // namespace c0ipg
