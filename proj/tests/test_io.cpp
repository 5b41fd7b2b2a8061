// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/error.hpp"
#include "sklab/io.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace sklab;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_CASE("format_double round-trips")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("underdamped snapshot round trip")
{
    const auto dir = sktest::scratch("io_ud");
    std::vector<UnderdampedEnsemble> snaps;
    for (int s = 0; s < 3; ++s)
    {
        UnderdampedEnsemble e;
        e.epsilon = 0.05;
        e.t = 0.1 * s + 1.0 / 3.0;
        e.positions = PointSet(4, 2);
        e.velocities = PointSet(4, 2);
        for (std::size_t i = 0; i < 4; ++i)
            for (int k = 0; k < 2; ++k)
            {
                e.positions(i, k) = std::sin(1.0 + i + 7 * k + s) / 3.0;
                e.velocities(i, k) = std::exp(0.1 * i - k) * 1e-7;
            }
        snaps.push_back(e);
    }
    write_snapshot_csv(dir / "ud.csv", snaps);
    CHECK(first_line(dir / "ud.csv") == "t,particle,x0,x1,v0,v1");
    const auto back = read_snapshot_csv(dir / "ud.csv", 0.05);
    REQUIRE(back.size() == 3);
    for (int s = 0; s < 3; ++s)
    {
        CHECK(back[s].t == snaps[s].t);
        CHECK(back[s].positions == snaps[s].positions);
        CHECK(back[s].velocities == snaps[s].velocities);
    }
}

TEST_CASE("overdamped, density and weak-gap files")
{
    const auto dir = sktest::scratch("io_other");
    OverdampedEnsemble o;
    o.t = 0.5;
    o.positions = PointSet(2, 1);
    o.positions(1, 0) = 0.25;
    write_snapshot_csv(dir / "od.csv", std::vector<OverdampedEnsemble>{o});
    CHECK(slurp(dir / "od.csv") == "t,particle,x0\n0.5,0,0\n0.5,1,0.25\n");

    Grid1D g = make_grid(1.0, 2);
    g.density = {0.25, 0.75};
    write_density_csv(dir / "rho.csv", {g});
    CHECK(slurp(dir / "rho.csv") == "t,x_center,rho\n0,-0.5,0.25\n0,0.5,0.75\n");

    WeakGapRow r;
    r.epsilon = 0.1;
    r.t = 1.0;
    r.psi_id = 2;
    r.Y = 0.5;
    r.Yhat = 0.25;
    r.Ystar = 0.125;
    r.mc_stderr = 0.01;
    write_weak_gap_csv(dir / "weak.csv", {r});
    CHECK(slurp(dir / "weak.csv") ==
          "epsilon,t,psi_id,Y,Yhat,Ystar,gap_Y_Ystar,gap_Y_Yhat,mc_stderr\n"
          "0.10000000000000001,1,2,0.5,0.25,0.125,0.375,0.25,0.01\n");
}

TEST_CASE("write_text creates directories and reports failures")
{
    const auto dir = sktest::scratch("io_text");
    write_text(dir / "a" / "b" / "c.txt", "hello\n");
    CHECK(slurp(dir / "a" / "b" / "c.txt") == "hello\n");
    write_text(dir / "file", "x");
    try
    {
        write_text(dir / "file" / "sub" / "y.txt", "y");
        FAIL("expected an io error");
    }
    catch (const Error& e)
    {
        CHECK(e.kind() == ErrorKind::io);
    }
    CHECK_THROWS_AS(read_snapshot_csv(dir / "missing.csv", 0.1), Error);
    write_text(dir / "bad.csv", "a,b\n1,2\n");
    CHECK_THROWS_AS(read_snapshot_csv(dir / "bad.csv", 0.1), Error);
}
