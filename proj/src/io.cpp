#include "nfsde/io.hpp"
#include "nfsde/errors.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace nfsde {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string s = ss.str();
    return fnv1a64(s);
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

namespace {

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : f_(std::fopen(path.c_str(), "w")) {
        if (!f_) throw std::runtime_error("cannot open for writing: " + path.string());
    }
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void raw(const char* s) { std::fputs(s, f_); }
    void number(double v, bool lead_comma = true) {
        if (lead_comma) std::fputc(',', f_);
        std::fprintf(f_, "%.17g", v);
    }
    void integer(long v, bool lead_comma = false) {
        if (lead_comma) std::fputc(',', f_);
        std::fprintf(f_, "%ld", v);
    }
    void end_row() { std::fputc('\n', f_); }

private:
    std::FILE* f_;
};

} // namespace

void write_trajectories_csv(const std::filesystem::path& path, const Ensemble& ens) {
    CsvWriter w(path);
    w.raw("path_id,t");
    for (int r = 0; r < (ens.paths.empty() ? 0 : ens.paths.front().dim()); ++r) {
        char buf[24];
        std::snprintf(buf, sizeof buf, ",x_%d", r);
        w.raw(buf);
    }
    w.end_row();
    for (int k = 0; k < ens.n_paths(); ++k) {
        const Trajectory& traj = ens.paths[static_cast<std::size_t>(k)];
        for (int j = 0; j < traj.points(); ++j) {
            w.integer(k);
            w.number(traj.grid[static_cast<std::size_t>(j)]);
            for (int r = 0; r < traj.dim(); ++r) w.number(traj.values(r, j));
            w.end_row();
        }
    }
}

void write_picard_csv(const std::filesystem::path& path, const Ensemble& ens) {
    CsvWriter w(path);
    w.raw("path_id,n,D_n\n");
    for (std::size_t k = 0; k < ens.picard.size(); ++k) {
        const auto& d = ens.picard[k];
        for (std::size_t n = 0; n < d.sup_diffs.size(); ++n) {
            w.integer(static_cast<long>(k));
            w.integer(static_cast<long>(n + 1), true);
            w.number(d.sup_diffs[n]);
            w.end_row();
        }
    }
}

void write_noise_csv(const std::filesystem::path& wiener_path,
                     const std::filesystem::path& jumps_path, const LevySpec& spec,
                     const std::vector<std::uint64_t>& seeds, const std::vector<double>& grid) {
    CsvWriter w(wiener_path);
    w.raw("path_id,t");
    for (int r = 0; r < spec.dim_u; ++r) {
        char buf[24];
        std::snprintf(buf, sizeof buf, ",dw_%d", r);
        w.raw(buf);
    }
    w.end_row();
    CsvWriter jw(jumps_path);
    jw.raw("path_id,time,atom\n");
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        const NoisePath p = sample_path(spec, grid, seeds[k]);
        for (int j = 0; j < p.steps(); ++j) {
            w.integer(static_cast<long>(k));
            w.number(p.grid[static_cast<std::size_t>(j)]);
            for (int r = 0; r < spec.dim_u; ++r) w.number(p.wiener_increments(r, j));
            w.end_row();
        }
        for (const auto& ev : p.events) {
            jw.integer(static_cast<long>(k));
            jw.number(ev.time);
            jw.integer(ev.atom, true);
            jw.end_row();
        }
    }
}

void write_report_csv(const std::filesystem::path& path, const PeriodicityReport& rep) {
    CsvWriter w(path);
    w.raw("t,ms_gap,ms_se,trunc,trunc_se,bl,bl_se\n");
    for (std::size_t i = 0; i < rep.t_checkpoints.size(); ++i) {
        w.number(rep.t_checkpoints[i], false);
        w.number(rep.ms_gaps[i].estimate);
        w.number(rep.ms_gaps[i].std_error);
        w.number(rep.trunc_bounds[i].estimate);
        w.number(rep.trunc_bounds[i].std_error);
        w.number(rep.bl_gaps[i].estimate);
        w.number(rep.bl_gaps[i].bootstrap_std_error);
        w.end_row();
    }
}

void write_gap_dat(const std::filesystem::path& path, const std::vector<double>& t,
                   const std::vector<double>& gap, const std::vector<double>& se) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    std::fputs("# t gap se\n", f);
    for (std::size_t i = 0; i < t.size(); ++i)
        std::fprintf(f, "%.17g %.17g %.17g\n", t[i], gap[i], i < se.size() ? se[i] : 0.0);
    std::fclose(f);
}

std::string report_to_json(const PeriodicityReport& rep) {
    json j;
    j["omega"] = rep.omega;
    j["n_paths"] = rep.n_paths;
    j["checkpoints"] = rep.t_checkpoints;
    auto arr = json::array();
    for (std::size_t i = 0; i < rep.t_checkpoints.size(); ++i) {
        json row;
        row["t"] = rep.t_checkpoints[i];
        row["ms_gap"] = {{"estimate", rep.ms_gaps[i].estimate}, {"se", rep.ms_gaps[i].std_error}};
        row["trunc_bound"] = {{"estimate", rep.trunc_bounds[i].estimate},
                              {"se", rep.trunc_bounds[i].std_error}};
        row["bl_gap"] = {{"estimate", rep.bl_gaps[i].estimate},
                         {"se", rep.bl_gaps[i].bootstrap_std_error}};
        arr.push_back(row);
    }
    j["gaps"] = arr;
    j["ms_verdict"] = to_string(rep.ms_verdict);
    j["bl_verdict"] = to_string(rep.bl_verdict);
    return j.dump(2);
}

Ensemble read_trajectories_csv(const std::filesystem::path& path, const ModelSpec& model,
                               const SolverConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectories file: " + path.string());
    std::string header;
    std::getline(in, header);

    Ensemble ens;
    ens.model = std::make_shared<ModelSpec>(model);
    ens.config = cfg;

    const int m0 = static_cast<int>(std::lround(model.tau / cfg.step_h));
    const int total = m0 + cfg.main_steps() + 1;
    const int d = model.dim();

    std::string line;
    int current = -1;
    int col = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        const int pid = std::stoi(tok);
        std::getline(ls, tok, ','); // t
        const double t = std::stod(tok);
        if (pid != current) {
            if (current >= 0 && col != total)
                throw std::runtime_error("trajectories file: truncated path block");
            current = pid;
            col = 0;
            Trajectory traj;
            traj.step_h = cfg.step_h;
            traj.tau = model.tau;
            traj.history_points = m0;
            traj.grid.resize(static_cast<std::size_t>(total));
            traj.values.setZero(d, total);
            traj.jump_marks.assign(static_cast<std::size_t>(total), 0);
            ens.paths.push_back(std::move(traj));
        }
        Trajectory& traj = ens.paths.back();
        if (col >= total) throw std::runtime_error("trajectories file: extra rows in path block");
        traj.grid[static_cast<std::size_t>(col)] = t;
        for (int r = 0; r < d; ++r) {
            if (!std::getline(ls, tok, ','))
                throw std::runtime_error("trajectories file: missing component");
            traj.values(r, col) = std::stod(tok);
        }
        ++col;
    }
    if (current >= 0 && col != total)
        throw std::runtime_error("trajectories file: truncated path block");
    return ens;
}

std::string RunManifest::to_json() const {
    json j;
    j["version"] = version;
    j["master_seed"] = master_seed;
    j["paths"] = n_paths;
    j["scheme"] = scheme;
    j["grid"] = {{"step_h", step_h}, {"horizon_T", horizon_T}, {"points", grid_points}};
    j["wall_seconds"] = wall_seconds;
    json files = json::object();
    for (const auto& [name, hash] : file_hashes) files[name] = hash;
    j["files"] = files;
    j["config"] = json::parse(config_echo);
    return j.dump(2);
}

RunManifest RunManifest::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("manifest parse error: " + std::string(e.what()));
    }
    RunManifest m;
    m.version = j.value("version", "");
    m.master_seed = j.value("master_seed", 0ULL);
    m.n_paths = j.value("paths", 0);
    m.scheme = j.value("scheme", "time_step");
    if (j.contains("grid")) {
        m.step_h = j["grid"].value("step_h", 0.0);
        m.horizon_T = j["grid"].value("horizon_T", 0.0);
        m.grid_points = j["grid"].value("points", 0);
    }
    m.wall_seconds = j.value("wall_seconds", 0.0);
    if (j.contains("files"))
        for (const auto& [k, v] : j["files"].items()) m.file_hashes.emplace_back(k, v.get<std::string>());
    m.config_echo = j.at("config").dump(2);
    return m;
}

} // namespace nfsde
