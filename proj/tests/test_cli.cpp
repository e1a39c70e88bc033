#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run(const std::string& args) {
    const std::string cmd = std::string(SIXV_CLI) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            else if (ch == ',' && !quoted) cells.push_back(std::move(cell)), cell.clear();
            else cell += ch;
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(Cli, TwoColumnMeasureIsOneAtom) {
    const CliResult r = run("measure --L 2 --c 1.7321");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"L", "c", "a", "b", "weight"}));
    const double c = 1.7321;
    EXPECT_NEAR(std::stod(rows[1][2]), 2 * c * c / (2 + c * c), 1e-13);
    EXPECT_NEAR(std::stod(rows[1][3]), std::numbers::pi, 1e-13);
    EXPECT_NEAR(std::stod(rows[1][4]), 0.25, 1e-13);
}

TEST(Cli, WienerHopfSweep) {
    const CliResult r = run("wh --zeta 0,0.5236,1.0472,1.5708,2.0944");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0][3], "ratio_neumann");
    EXPECT_EQ(rows[0][6], "fpp_closed");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_NEAR(std::stod(rows[i][3]) / std::stod(rows[i][2]), 1.0, 1e-3);
        EXPECT_NEAR(std::stod(rows[i][7]), std::stod(rows[i][5]), 1e-3);
    }
}

TEST(Cli, DeterministicOutputAndDigits) {
    const CliResult a = run("mc --W 12 --H 12 --sweeps 500 --chains 2 --seed 9");
    const CliResult b = run("mc --W 12 --H 12 --sweeps 500 --chains 2 --seed 9 --threads 1");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, run("mc --W 12 --H 12 --sweeps 500 --chains 2 --seed 10").out);
    const auto g = csv(run("gff --c 2").out);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[1][3], "0.63661977236758138");
}

TEST(Cli, ConfigFileAndFlagsWin) {
    const std::string path = testing::TempDir() + "sixv_cfg.txt";
    std::ofstream(path) << "L=4,6\nc=2\n";
    const auto rows = csv(run("correlate --config " + path + " --c 1").out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][0], "4");
    EXPECT_EQ(rows[2][0], "6");
    EXPECT_EQ(rows[1][1], "1");
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("bogus").code, 1);
    EXPECT_EQ(run("spectrum --L 3").code, 1);
    EXPECT_EQ(run("wh --zeta 2.5").code, 1);
    EXPECT_EQ(run("gff --c 3").code, 1);
    EXPECT_EQ(run("verify --criteria 12").code, 1);
    EXPECT_EQ(run("verify --criteria 1,6").code, 0);
    EXPECT_EQ(run("correlate --L 4 --tolerance 1e-30 --quad \"0,0;1,1;3,0;4,2\"").code, 2);
}
