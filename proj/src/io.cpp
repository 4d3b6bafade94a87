#include "satmix/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "satmix/errors.hpp"

namespace satmix {

namespace {

FILE* open_or_throw(const std::string& path, const char* mode) {
    FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw ConfigError("cannot open output file: " + path);
    return f;
}

}  // namespace

void write_field_csv(const std::string& path, const ScalarField& f, const Grid& g) {
    FILE* fp = open_or_throw(path, "w");
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int c = g.cell(i, j);
            std::fprintf(fp, "%.17g%c", g.is_fluid(c) ? f[c] : 0.0, i + 1 < g.nx ? ',' : '\n');
        }
    }
    std::fclose(fp);
}

void write_field_pgm(const std::string& path, const ScalarField& f, const Grid& g) {
    FILE* fp = open_or_throw(path, "wb");
    std::fprintf(fp, "P5\n%d %d\n255\n", g.nx, g.ny);
    std::vector<unsigned char> row(g.nx);
    for (int j = g.ny - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx; ++i) {
            int c = g.cell(i, j);
            double v = g.is_fluid(c) ? std::clamp(f[c], 0.0, 1.0) : 0.0;
            row[i] = (unsigned char)std::lround(255.0 * (1.0 - v));
        }
        std::fwrite(row.data(), 1, row.size(), fp);
    }
    std::fclose(fp);
}

void write_diag_csv(const std::string& path, const Trajectory& traj) {
    FILE* fp = open_or_throw(path, "w");
    std::fprintf(fp, "time,dt,mass1,mass2,min,max,winf,components\n");
    for (const auto& s : traj.snapshots)
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s.t, s.dt, s.mass1,
                     s.mass2, s.rho_min, s.rho_max, s.w_inf, s.saturated_components);
    std::fclose(fp);
}

void write_trajectory(const Trajectory& traj, const OutputSpec& out) {
    namespace fs = std::filesystem;
    if (out.dir.empty()) throw ConfigError("output directory not set");
    fs::create_directories(out.dir);
    const Grid& g = traj.grid;
    for (const auto& s : traj.snapshots) {
        std::string stem = out.dir + "/";
        if (out.csv) {
            write_field_csv(stem + "rho_" + std::to_string(s.step) + ".csv", s.rho1, g);
            write_field_csv(stem + "p_" + std::to_string(s.step) + ".csv", s.p, g);
            if (s.rho2)
                write_field_csv(stem + "rho2_" + std::to_string(s.step) + ".csv", *s.rho2, g);
        }
        if (out.pgm) write_field_pgm(stem + "rho_" + std::to_string(s.step) + ".pgm", s.rho1, g);
    }
    write_diag_csv(out.dir + "/diag.csv", traj);
}

ScalarField read_field_csv(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file: " + path);
    ScalarField f(g.cells());
    std::string line;
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(in, line)) throw ConfigError("field file has too few rows: " + path);
        std::istringstream ls(line);
        std::string tok;
        for (int i = 0; i < g.nx; ++i) {
            if (!std::getline(ls, tok, ','))
                throw ConfigError("field file has too few columns: " + path);
            f[g.cell(i, j)] = std::stod(tok);
        }
    }
    return f;
}

}  // namespace satmix
