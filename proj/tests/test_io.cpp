#include "doctest.h"

#include "kreinamo/error.hpp"
#include "kreinamo/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace kreinamo;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("csv writer enforces the column count") {
    std::ostringstream os;
    CsvWriter w(os, {"a", "b"});
    w.cell(1).cell(2.5);
    w.end_row();
    CHECK(os.str() == "a,b\n1,2.5\n");
    w.cell(1);
    CHECK_THROWS(w.end_row());
}

TEST_CASE("branch csv header and conjugate filtering") {
    SweepResult s;
    s.M = 50;
    Branch b;
    b.id = 3;
    b.points = {{0.0, {-1.0, 0.0}, 50, true}, {0.5, {-1.0, -0.2}, 50, false}, {1.0, {-1.0, 0.3}, 50, false}};
    s.branches.push_back(b);
    std::ostringstream os;
    write_branches_csv(os, s);
    CHECK(first_line(os.str()) == "branch_id,param,re_lambda,im_lambda,is_real,grid_M");
    CHECK(os.str().find("-0.2") == std::string::npos);
    CHECK(os.str().find("3,1,-1,0.29999999999999999,0,50") != std::string::npos);
}

TEST_CASE("branch point csv leaves param_2 empty for order 2") {
    BranchPoint p;
    p.param_1 = 0.25;
    p.lambda = {-9.5, 0.0};
    p.residual = 1e-3;
    std::ostringstream os;
    write_branch_points_csv(os, {p});
    CHECK(first_line(os.str()) == "order,param_1,param_2,re_lambda,im_lambda,residual");
    CHECK(os.str().find("2,0.25,,-9.5,0,0.001") != std::string::npos);
}

TEST_CASE("soliton and resonance csv headers") {
    std::ostringstream a, b;
    write_soliton_csv(a, {SolitonRow{0, 2.0, {0.3, 0.0}, {0.447, 0.0}, true, 100.0, 2000}});
    CHECK(first_line(a.str()) == "l,x0,re_lambda,im_lambda,epsilon_re,epsilon_im,localized_flag,X,M");
    write_resonance_csv(b, {});
    CHECK(first_line(b.str()) ==
          "dp_n,dp_m,eps,delta,alpha0_c,lambda0,j,lambda1_re_1,lambda1_im_1,lambda1_re_2,lambda1_im_2,"
          "observed_split_re,observed_split_im");
}

TEST_CASE("svg output is self-contained") {
    PlotPanel p{"test & <title>", "x", "y", {{"line", {{0.0, 1.0}, {1.0, 2.0}}}}, false};
    std::ostringstream os;
    write_svg(os, {p, p});
    const std::string s = os.str();
    CHECK(s.rfind("<?xml", 0) == 0);
    CHECK(s.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("href") == std::string::npos);
    CHECK(s.find("&amp;") != std::string::npos);
    CHECK(s.find("&lt;title&gt;") != std::string::npos);
}

TEST_CASE("write_file creates the directory") {
    const auto dir = std::filesystem::temp_directory_path() / "kreinamo_io_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    const std::string path = write_file(dir.string(), "x.txt", "hello");
    std::ifstream in(path);
    std::string text;
    std::getline(in, text);
    CHECK(text == "hello");
    std::filesystem::remove_all(dir.parent_path());
}
