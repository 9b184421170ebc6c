#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <c0ipg/history.hpp>

using namespace c0ipg;

namespace {

AdaptTrace sample_trace()
{
    AdaptTrace trace;
    const Complex ks[] = {{2.9, 0.0}, {2.8512345678901234, -1e-13}, {5.57000885123456, -1.31142340987654}};
    for (int i = 0; i < 3; ++i) {
        IterationRecord r;
        r.iter = i;
        r.dof = 1000 * (i + 1) + 7;
        r.k = ks[i];
        r.lambda = r.k * r.k;
        r.eta2_primal = 0.125 / (i + 1);
        r.eta2_dual = 0.0625 / (i + 1);
        r.eta2_total = r.eta2_primal + r.eta2_dual;
        r.marked = i == 2 ? 0 : 17 + i;
        r.seconds = 0.25 * (i + 1);
        trace.records.push_back(r);
    }
    return trace;
}

}  // namespace

TEST(History, ExactHeader)
{
    EXPECT_EQ(kHistoryHeader, "iter,dof,k_re,k_im,err_abs,eta2_primal,eta2_dual,eta2_total,marked,seconds");
}

TEST(History, EmptyTraceIsHeaderOnly)
{
    std::ostringstream out;
    emit_history(out, AdaptTrace{}, std::nullopt);
    EXPECT_EQ(out.str(), std::string(kHistoryHeader) + "\n");
    std::istringstream in(out.str());
    EXPECT_TRUE(parse_history(in).empty());
}

TEST(History, RoundTripWithReference)
{
    const AdaptTrace trace = sample_trace();
    const Complex reference(2.80677803, 0.0);
    std::ostringstream out;
    emit_history(out, trace, reference);
    std::istringstream in(out.str());
    const auto rows = parse_history(in);
    ASSERT_EQ(rows.size(), trace.records.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const IterationRecord& r = trace.records[i];
        EXPECT_EQ(rows[i].iter, r.iter);
        EXPECT_EQ(rows[i].dof, r.dof);
        EXPECT_NEAR(std::abs(rows[i].k - r.k), 0.0, 1e-11);
        ASSERT_TRUE(rows[i].err_abs.has_value());
        EXPECT_NEAR(*rows[i].err_abs, std::abs(r.k - reference), 1e-11);
        EXPECT_NEAR(rows[i].eta2_primal, r.eta2_primal, 1e-11 * r.eta2_primal);
        EXPECT_NEAR(rows[i].eta2_dual, r.eta2_dual, 1e-11 * r.eta2_dual);
        EXPECT_NEAR(rows[i].eta2_total, r.eta2_total, 1e-11 * r.eta2_total);
        EXPECT_EQ(rows[i].marked, r.marked);
        EXPECT_NEAR(rows[i].seconds, r.seconds, 1e-12);
    }
}

TEST(History, NoReferenceLeavesErrorEmpty)
{
    std::ostringstream out;
    emit_history(out, sample_trace(), std::nullopt);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        EXPECT_NE(line.find(",,"), std::string::npos) << line;
    }
    std::istringstream in(out.str());
    for (const HistoryRow& row : parse_history(in)) {
        EXPECT_FALSE(row.err_abs.has_value());
    }
}

TEST(History, TwelveSignificantDigits)
{
    AdaptTrace trace;
    IterationRecord r;
    r.k = Complex(2.80677803123456789, 0.0);
    trace.records.push_back(r);
    std::ostringstream out;
    emit_history(out, trace, std::nullopt);
    EXPECT_NE(out.str().find(",2.80677803123,"), std::string::npos) << out.str();
}

TEST(History, FileRoundTrip)
{
    const auto path = std::filesystem::temp_directory_path() / "c0ipg_history_test.csv";
    emit_history(path.string(), sample_trace(), Complex(1.0, 0.0));
    std::ifstream in(path);
    EXPECT_EQ(parse_history(in).size(), 3u);
    std::filesystem::remove(path);
    EXPECT_THROW(emit_history("/nonexistent-dir/history.csv", sample_trace(), std::nullopt), std::runtime_error);
}

TEST(History, RejectsMalformedInput)
{
    const std::string header(kHistoryHeader);
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_history(in);
    };
    EXPECT_THROW(parse("iter,dof\n"), std::runtime_error);
    EXPECT_THROW(parse(""), std::runtime_error);
    EXPECT_THROW(parse(header + "\n0,10,1.0,0.0,,1,1,2,3\n"), std::runtime_error);
    EXPECT_THROW(parse(header + "\n0,10,abc,0.0,,1,1,2,3,0.5\n"), std::runtime_error);
    EXPECT_EQ(parse(header + "\n0,10,1.5,-0.5,,1,1,2,3,0.5\n").size(), 1u);
}

TEST(Indicators, CsvLayout)
{
    std::ostringstream out;
    write_indicators(out, {0.5, 0.25, 0.0});
    EXPECT_EQ(out.str(), "triangle_id,eta_sq\n0,0.5\n1,0.25\n2,0\n");
}

TEST(ParseComplex, Forms)
{
    EXPECT_EQ(parse_complex("2.5"), Complex(2.5, 0.0));
    EXPECT_EQ(parse_complex("-1e-3"), Complex(-1e-3, 0.0));
    EXPECT_EQ(parse_complex("5.57000885-1.31142340i"), Complex(5.57000885, -1.31142340));
    EXPECT_EQ(parse_complex("2.92423162 - 0.56458999i"), Complex(2.92423162, -0.56458999));
    EXPECT_EQ(parse_complex("1+2j"), Complex(1.0, 2.0));
    EXPECT_EQ(parse_complex("3i"), Complex(0.0, 3.0));
    EXPECT_EQ(parse_complex("-i"), Complex(0.0, -1.0));
    EXPECT_EQ(parse_complex("1e-2+1e+1i"), Complex(1e-2, 10.0));
    EXPECT_THROW(parse_complex(""), std::invalid_argument);
    EXPECT_THROW(parse_complex("abc"), std::invalid_argument);
    EXPECT_THROW(parse_complex("1+xi"), std::invalid_argument);
}
