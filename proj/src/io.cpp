#include "zkflat/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace zkflat {

std::string fmt_double(double v) {
    char buf[40];
    // try successively longer forms until the value round-trips
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

std::string config_hash_hex(const std::string& canonical_config) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_config) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table, const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings
    require(out.good(), "csv: cannot open " + path + " for writing");
    if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
    for (size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t c = 0; c < row.size(); ++c)
            out << fmt_double(row[c]) << (c + 1 < row.size() ? "," : "");
        out << "\n";
    }
    require(out.good(), "csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "csv: cannot open " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (!row.empty()) table.rows.push_back(std::move(row));
    }
    require(have_header, "csv: no header row in " + path);
    return table;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "io: cannot open " + path + " for writing");
    out << text;
    require(out.good(), "io: write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "io: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line, section;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config: expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        kv[section.empty() ? key : section + "." + key] = val;
    }
    return kv;
}

CsvTable control_to_csv(const ControlSignal& h) {
    CsvTable t;
    t.columns = {"t", "y", "h"};
    t.rows.reserve(h.t.size() * h.y.size());
    for (size_t k = 0; k < h.t.size(); ++k)
        for (size_t iy = 0; iy < h.y.size(); ++iy)
            t.rows.push_back({h.t[k], h.y[iy], h.h(static_cast<int>(k), static_cast<int>(iy))});
    return t;
}

ControlSignal control_from_csv(const CsvTable& table, int j_max) {
    require(table.columns.size() == 3 && table.columns[0] == "t" && table.columns[1] == "y",
            "control csv: expected header t,y,h");
    ControlSignal cs;
    cs.j_max = j_max;
    cs.synthesis_type = "imported";
    for (const auto& row : table.rows) {
        require(row.size() == 3, "control csv: malformed row");
        if (cs.t.empty() || row[0] > cs.t.back()) cs.t.push_back(row[0]);
        if (cs.t.size() == 1) cs.y.push_back(row[1]);
    }
    const size_t nt = cs.t.size(), ny = cs.y.size();
    require(table.rows.size() == nt * ny, "control csv: ragged (t, y) grid");
    cs.samples.assign(nt * ny, 0.0);
    for (size_t k = 0; k < nt; ++k)
        for (size_t iy = 0; iy < ny; ++iy) cs.samples[k * ny + iy] = table.rows[k * ny + iy][2];
    const TransverseBasis basis(j_max);
    cs.mode_coeffs.assign(nt * static_cast<size_t>(j_max), 0.0);
    std::vector<double> row(ny);
    for (size_t k = 0; k < nt; ++k) {
        for (size_t iy = 0; iy < ny; ++iy) row[iy] = cs.samples[k * ny + iy];
        const std::vector<double> c = sine_analyze(row, cs.y, basis);
        for (int j = 0; j < j_max; ++j) cs.mode_coeffs[k * j_max + j] = c[j];
    }
    return cs;
}

CsvTable evolution_to_csv(const std::vector<ModeEvolution>& evs, int t_stride) {
    CsvTable t;
    t.columns = {"j", "t", "x", "value"};
    for (const ModeEvolution& ev : evs)
        for (int k = 0; k <= ev.nt(); k += t_stride) {
            const double* snap = ev.snapshot(k);
            for (int i = 0; i < ev.nx(); ++i)
                t.rows.push_back({static_cast<double>(ev.j), ev.time(k), ev.x[i], snap[i]});
        }
    return t;
}

CsvTable field2d_to_csv(const Field& f) {
    require(f.dims == 2, "field csv: expects a 2D field");
    CsvTable t;
    t.columns = {"x", "y", "value"};
    for (int ix = 0; ix < f.grid.nx(); ++ix)
        for (int iy = 0; iy < f.grid.ny(); ++iy)
            t.rows.push_back({f.grid.x[ix], f.grid.y[iy], f.at(ix, iy)});
    return t;
}

std::string flat_output_to_json(const FlatOutput& z, const std::vector<double>& times,
                                const std::string& config_hash) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int j = 1; j <= z.j_max(); ++j)
        for (int i = 0; i <= z.i_max(); ++i) {
            nlohmann::ordered_json e;
            e["j"] = j;
            e["i"] = i;
            std::vector<double> samples;
            samples.reserve(times.size());
            for (double t : times) samples.push_back(z.z(j, i, t));
            e["samples"] = samples;
            arr.push_back(std::move(e));
        }
    nlohmann::ordered_json doc;
    if (!config_hash.empty()) doc["config_hash"] = config_hash;
    doc["t"] = times;
    doc["entries"] = std::move(arr);
    return doc.dump(2) + "\n";
}

std::string reach_coefficients_to_json(const ReachCoefficients& b,
                                       const std::string& config_hash) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int j = 1; j <= b.j_max; ++j)
        for (int i = 0; i <= b.i_max; ++i) {
            nlohmann::ordered_json e;
            e["i"] = i;
            e["j"] = j;
            e["value"] = b.at(i, j);
            arr.push_back(std::move(e));
        }
    nlohmann::ordered_json doc;
    if (!config_hash.empty()) doc["config_hash"] = config_hash;
    doc["source"] = b.source;
    doc["entries"] = std::move(arr);
    return doc.dump(2) + "\n";
}

std::string control_modes_to_json(const ControlSignal& h, const std::string& config_hash) {
    nlohmann::ordered_json doc;
    if (!config_hash.empty()) doc["config_hash"] = config_hash;
    doc["t"] = h.t;
    nlohmann::ordered_json modes = nlohmann::ordered_json::array();
    for (int j = 1; j <= h.j_max; ++j) {
        nlohmann::ordered_json m;
        m["j"] = j;
        std::vector<double> vals(h.t.size());
        for (size_t k = 0; k < h.t.size(); ++k) vals[k] = h.mode(static_cast<int>(k), j);
        m["values"] = vals;
        modes.push_back(std::move(m));
    }
    doc["modes"] = std::move(modes);
    return doc.dump(2) + "\n";
}

} // namespace zkflat
