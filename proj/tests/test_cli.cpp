#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

/// Runs the CLI with stderr discarded.
Run run(const std::string& args) {
    const std::string cmd = std::string(QGRAPH_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string fixture(const std::string& name) { return std::string(QGRAPH_FIXTURES_DIR) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');)
        out.push_back(f);
    return out;
}

} // namespace

TEST(Cli, DoubleEdgeSpectrum) {
    const auto r = run("spectrum " + fixture("double_edge.graph"));
    EXPECT_EQ(r.status, 0);
    const std::vector<std::string> want{"lambda,multiplicity", "0,1", "1,2", "4,2", "9,2"};
    EXPECT_EQ(lines(r.out), want);
}

TEST(Cli, WindowFlagsOverrideFile) {
    const auto r = run("spectrum " + fixture("double_edge.graph") + " --lo 0.5 --hi 5");
    EXPECT_EQ(r.status, 0);
    const std::vector<std::string> want{"lambda,multiplicity", "1,2", "4,2"};
    EXPECT_EQ(lines(r.out), want);
}

TEST(Cli, TwoLoopVerify) {
    const auto r = run("verify " + fixture("two_loop.graph"));
    EXPECT_EQ(r.status, 0);
    const auto ls = lines(r.out);
    ASSERT_GE(ls.size(), 2u);
    EXPECT_EQ(fields(ls[0]).front(), "lambda");
    const auto first = fields(ls[1]);
    ASSERT_GE(first.size(), 5u);
    EXPECT_EQ(first[0], "1");
    EXPECT_EQ(first[1], "4");
    EXPECT_EQ(first[2], "0");
    EXPECT_EQ(first[3], "4");
    EXPECT_EQ(first[4], "4");
}

TEST(Cli, LassoResidues) {
    const auto r = run("residues " + fixture("lasso.graph"));
    EXPECT_EQ(r.status, 0);
    int invisible = 0;
    for (const auto& l : lines(r.out)) {
        const auto f = fields(l);
        if (f.size() == 4 && f[2] == "0") {
            ++invisible;
            EXPECT_TRUE(f[0] == "4" || f[0] == "16") << l;
        }
    }
    EXPECT_EQ(invisible, 2);
}

TEST(Cli, IntervalWeylClosedForm) {
    const auto r = run("weyl " + fixture("interval.graph") + " --mu -1");
    EXPECT_EQ(r.status, 0);
    const double sh = std::sinh(1.0), ch = std::cosh(1.0);
    const double want[2][2] = {{ch / sh, 1.0 / sh}, {1.0 / sh, ch / sh}};
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 5u);
    EXPECT_EQ(ls[0], "row,col,re,im");
    for (std::size_t k = 1; k < ls.size(); ++k) {
        const auto f = fields(ls[k]);
        ASSERT_EQ(f.size(), 4u);
        EXPECT_NEAR(std::stod(f[2]), want[std::stoi(f[0])][std::stoi(f[1])], 1e-9);
        EXPECT_EQ(f[3], "0");
    }
}

TEST(Cli, ComplexMu) {
    const auto r = run("weyl " + fixture("lasso.graph") + " --mu 4,0.5");
    EXPECT_EQ(r.status, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 2u);
    // Nevanlinna: Im M >= 0 in the upper half-plane.
    EXPECT_GT(std::stod(fields(ls[1])[3]), 0.0);
}

TEST(Cli, ScanDetGrid) {
    const auto r = run("scan-det " + fixture("interval.graph") + " --lo 0 --hi 10 --points 11");
    EXPECT_EQ(r.status, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 12u);
    EXPECT_EQ(ls[0], "lambda,det,sigma_min");
    EXPECT_EQ(fields(ls[1])[0], "0");
    EXPECT_EQ(fields(ls[11])[0], "10");
}

TEST(Cli, Deterministic) {
    const auto a = run("verify " + fixture("delta_potential.graph"));
    const auto b = run("verify " + fixture("delta_potential.graph"));
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.out, b.out);
    EXPECT_GT(lines(a.out).size(), 3u);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("spectrum /nonexistent.graph").status, 2);
    EXPECT_EQ(run("spectrum " + fixture("lasso.graph") + " --bogus").status, 2);
    EXPECT_EQ(run("weyl " + fixture("interval.graph") + " --mu abc").status, 2);
    EXPECT_EQ(run("weyl " + fixture("interval.graph")).status, 2);
    EXPECT_EQ(run("").status, 2);
    EXPECT_EQ(run("spectrum " + fixture("lasso.graph") + " --lo 5 --hi 1").status, 2);
    const std::string bad = testing::TempDir() + "/bad.graph";
    std::ofstream(bad) << "[vertices]\ncount = 2\n[edges]\n0 1 -1\n[B]\n0\n";
    EXPECT_EQ(run("spectrum " + bad + " --lo 0 --hi 1").status, 2);
}

TEST(Cli, NumericalErrorAtEigenvalue) {
    EXPECT_EQ(run("weyl " + fixture("interval.graph") + " --mu 0").status, 3);
}

TEST(Cli, HelpExitsZero) {
    const auto r = run("--help");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("spectrum"), std::string::npos);
}
