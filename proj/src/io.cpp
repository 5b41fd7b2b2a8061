// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/io.hpp"

#include "sklab/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sklab {
namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            fail(ErrorKind::io, "cannot create directory " + path.parent_path().string() +
                                    ": " + ec.message());
    }
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        fail(ErrorKind::io, "write failed for " + path.string());
}

std::vector<double> split_numbers(const std::string& line, const std::filesystem::path& path)
{
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
        try
        {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size())
                throw std::invalid_argument(cell);
        }
        catch (const std::exception&)
        {
            fail(ErrorKind::io, path.string() + ": malformed number '" + cell + "'");
        }
    }
    return out;
}

}  // namespace

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_snapshot_csv(const std::filesystem::path& path,
                        const std::vector<UnderdampedEnsemble>& snapshots)
{
    auto out = open_out(path);
    const int d = snapshots.empty() ? 0 : snapshots.front().dim();
    out << "t,particle";
    for (int k = 0; k < d; ++k)
        out << ",x" << k;
    for (int k = 0; k < d; ++k)
        out << ",v" << k;
    out << '\n';
    for (const auto& s : snapshots)
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            out << format_double(s.t) << ',' << i;
            for (int k = 0; k < d; ++k)
                out << ',' << format_double(s.positions(i, k));
            for (int k = 0; k < d; ++k)
                out << ',' << format_double(s.velocities(i, k));
            out << '\n';
        }
    finish(out, path);
}

void write_snapshot_csv(const std::filesystem::path& path,
                        const std::vector<OverdampedEnsemble>& snapshots)
{
    auto out = open_out(path);
    const int d = snapshots.empty() ? 0 : snapshots.front().dim();
    out << "t,particle";
    for (int k = 0; k < d; ++k)
        out << ",x" << k;
    out << '\n';
    for (const auto& s : snapshots)
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            out << format_double(s.t) << ',' << i;
            for (int k = 0; k < d; ++k)
                out << ',' << format_double(s.positions(i, k));
            out << '\n';
        }
    finish(out, path);
}

std::vector<UnderdampedEnsemble> read_snapshot_csv(const std::filesystem::path& path,
                                                   double epsilon)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    std::size_t columns = 1;
    for (char c : header)
        columns += (c == ',');
    if (header.rfind("t,particle", 0) != 0 || columns < 4 || (columns - 2) % 2 != 0)
        fail(ErrorKind::io, path.string() + ": not an underdamped snapshot file");
    const int d = static_cast<int>((columns - 2) / 2);

    std::vector<std::vector<std::vector<double>>> groups;
    std::vector<double> times;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        auto row = split_numbers(line, path);
        if (row.size() != columns)
            fail(ErrorKind::io, path.string() + ": wrong column count");
        if (times.empty() || row[0] != times.back() || static_cast<std::size_t>(row[1]) == 0)
        {
            times.push_back(row[0]);
            groups.emplace_back();
        }
        groups.back().push_back(std::move(row));
    }
    std::vector<UnderdampedEnsemble> out;
    for (std::size_t g = 0; g < groups.size(); ++g)
    {
        UnderdampedEnsemble e;
        e.epsilon = epsilon;
        e.t = times[g];
        e.positions = PointSet(groups[g].size(), d);
        e.velocities = PointSet(groups[g].size(), d);
        for (std::size_t i = 0; i < groups[g].size(); ++i)
            for (int k = 0; k < d; ++k)
            {
                e.positions(i, k) = groups[g][i][2 + k];
                e.velocities(i, k) = groups[g][i][2 + d + k];
            }
        out.push_back(std::move(e));
    }
    return out;
}

void write_density_csv(const std::filesystem::path& path, const std::vector<Grid1D>& snapshots)
{
    auto out = open_out(path);
    out << "t,x_center,rho\n";
    for (const auto& g : snapshots)
        for (int m = 0; m < g.M; ++m)
            out << format_double(g.t) << ',' << format_double(g.center(m)) << ','
                << format_double(g.density[m]) << '\n';
    finish(out, path);
}

void write_weak_gap_csv(const std::filesystem::path& path, const WeakGapReport& report)
{
    auto out = open_out(path);
    out << "epsilon,t,psi_id,Y,Yhat,Ystar,gap_Y_Ystar,gap_Y_Yhat,mc_stderr\n";
    for (const auto& r : report)
        out << format_double(r.epsilon) << ',' << format_double(r.t) << ',' << r.psi_id << ','
            << format_double(r.Y) << ',' << format_double(r.Yhat) << ','
            << format_double(r.Ystar) << ',' << format_double(r.gap_Y_Ystar()) << ','
            << format_double(r.gap_Y_Yhat()) << ',' << format_double(r.mc_stderr) << '\n';
    finish(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
    finish(out, path);
}

}  // namespace sklab
