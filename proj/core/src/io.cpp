#include "crane3d/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crane3d/errors.hpp"

namespace crane3d {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_keys(const ordered_json& j, const std::vector<std::string>& allowed,
                const std::string& ctx) {
    if (!j.is_object()) throw SchemaError(ctx + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw SchemaError(ctx + ": unknown key '" + it.key() + "'");
    }
}

double get_num(const ordered_json& j, const std::string& key, double def,
               const std::string& ctx) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number()) throw SchemaError(ctx + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

double require_num(const ordered_json& j, const std::string& key,
                   const std::string& ctx) {
    if (!j.contains(key)) throw SchemaError(ctx + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) throw SchemaError(ctx + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

ordered_json parse_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> cols;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw SchemaError("CSV is missing column '" + name + "'");
    }
};

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty CSV " + path.string());
    CsvTable t;
    t.header = split_csv_line(line);
    t.cols.resize(t.header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != t.header.size())
            throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                              ": wrong number of fields");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            char* end = nullptr;
            const double v = std::strtod(cells[i].c_str(), &end);
            if (end == cells[i].c_str())
                throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                                  ": bad number '" + cells[i] + "'");
            t.cols[i].push_back(v);
        }
    }
    return t;
}

// --- signal (de)serialization -------------------------------------------

ordered_json signal_to_json(const AxisSignal& s) {
    ordered_json j;
    switch (s.kind) {
        case AxisSignal::Kind::Zero:
            j["type"] = "zero";
            break;
        case AxisSignal::Kind::Constant:
            j["type"] = "constant";
            j["value"] = s.bias;
            break;
        case AxisSignal::Kind::Sine:
            j["type"] = "sine";
            j["amplitude"] = s.amplitude;
            j["freq_hz"] = s.freq_hz;
            j["bias"] = s.bias;
            j["phase"] = s.phase;
            break;
        case AxisSignal::Kind::Square:
            j["type"] = "square";
            j["amplitude"] = s.amplitude;
            j["period"] = s.period;
            j["bias"] = s.bias;
            break;
        case AxisSignal::Kind::Ramp:
            j["type"] = "ramp";
            j["rate"] = s.rate;
            j["start_time"] = s.start_time;
            j["bias"] = s.bias;
            break;
        case AxisSignal::Kind::MultiSine:
            j["type"] = "multisine";
            j["amplitudes"] = s.ms_amplitude;
            j["freqs_hz"] = s.ms_freq_hz;
            j["phases"] = s.ms_phase;
            j["bias"] = s.bias;
            break;
    }
    return j;
}

AxisSignal signal_from_json(const ordered_json& j, const std::string& ctx) {
    if (!j.is_object() || !j.contains("type"))
        throw SchemaError(ctx + ": signal needs a 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "zero") {
        check_keys(j, {"type"}, ctx);
        return AxisSignal::zero();
    }
    if (type == "constant") {
        check_keys(j, {"type", "value"}, ctx);
        return AxisSignal::constant(require_num(j, "value", ctx));
    }
    if (type == "sine") {
        check_keys(j, {"type", "amplitude", "freq_hz", "bias", "phase"}, ctx);
        return AxisSignal::sine(require_num(j, "amplitude", ctx),
                                require_num(j, "freq_hz", ctx),
                                get_num(j, "bias", 0.0, ctx),
                                get_num(j, "phase", 0.0, ctx));
    }
    if (type == "square") {
        check_keys(j, {"type", "amplitude", "period", "bias"}, ctx);
        return AxisSignal::square(require_num(j, "amplitude", ctx),
                                  require_num(j, "period", ctx),
                                  get_num(j, "bias", 0.0, ctx));
    }
    if (type == "ramp") {
        check_keys(j, {"type", "rate", "start_time", "bias"}, ctx);
        return AxisSignal::ramp(require_num(j, "rate", ctx),
                                get_num(j, "start_time", 0.0, ctx),
                                get_num(j, "bias", 0.0, ctx));
    }
    if (type == "multisine") {
        check_keys(j, {"type", "amplitudes", "freqs_hz", "phases", "bias"}, ctx);
        return AxisSignal::multisine(j.at("amplitudes").get<std::vector<double>>(),
                                     j.at("freqs_hz").get<std::vector<double>>(),
                                     j.at("phases").get<std::vector<double>>(),
                                     get_num(j, "bias", 0.0, ctx));
    }
    throw SchemaError(ctx + ": unknown signal type '" + type + "'");
}

// --- params (de)serialization ----------------------------------------------

ordered_json poly_to_json(const Polynomial4& p, double scale) {
    ordered_json arr = ordered_json::array();
    for (double c : p.c) arr.push_back(c * scale);
    return arr;
}

Polynomial4 poly_from_json(const ordered_json& j, double lo, double hi, double scale,
                           const std::string& ctx) {
    if (!j.is_array() || j.size() != 5)
        throw SchemaError(ctx + ": Coulomb map needs 5 polynomial coefficients");
    Polynomial4 p;
    for (std::size_t i = 0; i < 5; ++i) p.c[i] = j.at(i).get<double>() * scale;
    p.pos_min = lo;
    p.pos_max = hi;
    return p;
}

ordered_json encoder_to_json(const EncoderSpec& e) {
    ordered_json j;
    j["pulses_per_rev"] = e.pulses_per_rev;
    j["scale_x"] = e.scale_x;
    j["scale_y"] = e.scale_y;
    j["scale_l"] = e.scale_l;
    j["scale_alpha"] = e.scale_alpha;
    j["scale_beta"] = e.scale_beta;
    return j;
}

EncoderSpec encoder_from_json(const ordered_json& j, const std::string& ctx) {
    check_keys(j, {"pulses_per_rev", "scale_x", "scale_y", "scale_l", "scale_alpha",
                   "scale_beta"},
               ctx);
    EncoderSpec e;
    e.pulses_per_rev = static_cast<int>(get_num(j, "pulses_per_rev", 4096, ctx));
    e.scale_x = get_num(j, "scale_x", e.scale_x, ctx);
    e.scale_y = get_num(j, "scale_y", e.scale_y, ctx);
    e.scale_l = get_num(j, "scale_l", e.scale_l, ctx);
    e.scale_alpha = get_num(j, "scale_alpha", e.scale_alpha, ctx);
    e.scale_beta = get_num(j, "scale_beta", e.scale_beta, ctx);
    return e;
}

ordered_json params_to_json(const ParamsFile& pf) {
    const CraneParams& p = pf.params;
    const bool volts = pf.coulomb_convention == "volts";
    ordered_json j;
    j["convention"] = {{"coulomb_units", pf.coulomb_convention}};
    j["masses"] = {{"rail", p.m_rail}, {"trolley", p.m_trolley}, {"payload", p.m_payload}};
    j["gravity"] = p.gravity;
    j["u_sat"] = p.u_sat;
    ordered_json axes;
    auto linear_axis = [&](const AxisParams& ax) {
        ordered_json a;
        a["radius"] = ax.radius;
        a["pos_min"] = ax.pos_min;
        a["pos_max"] = ax.pos_max;
        a["gain"] = ax.gain;
        a["inertia"] = ax.inertia;
        a["viscous_pos"] = ax.friction.viscous_pos;
        a["viscous_neg"] = ax.friction.viscous_neg;
        const double s = volts ? 1.0 / ax.gain : 1.0;
        a["coulomb_pos"] = poly_to_json(ax.friction.coulomb_pos, s);
        a["coulomb_neg"] = poly_to_json(ax.friction.coulomb_neg, s);
        return a;
    };
    axes["x"] = linear_axis(p.x);
    axes["y"] = linear_axis(p.y);
    {
        ordered_json a;
        a["radius"] = p.l.radius;
        a["pos_min"] = p.l.pos_min;
        a["pos_max"] = p.l.pos_max;
        a["gain"] = p.l.gain;
        a["inertia"] = p.l.inertia;
        a["viscous"] = p.l.friction.viscous_pos;
        const double s = volts ? 1.0 / p.l.gain : 1.0;
        a["coulomb"] = p.l.friction.coulomb_pos.c[0] * s;
        axes["l"] = a;
    }
    j["axes"] = axes;
    j["swing_damping"] = {{"alpha", p.d_alpha}, {"beta", p.d_beta}};
    j["encoder"] = encoder_to_json(pf.encoder);
    j["complete"] = pf.complete;
    return j;
}

ParamsFile params_from_json(const ordered_json& j, const std::string& ctx) {
    check_keys(j, {"convention", "masses", "gravity", "u_sat", "axes", "swing_damping",
                   "encoder", "complete"},
               ctx);
    ParamsFile pf;
    if (j.contains("convention")) {
        check_keys(j.at("convention"), {"coulomb_units"}, ctx + ".convention");
        pf.coulomb_convention =
            j.at("convention").value("coulomb_units", std::string("volts"));
        if (pf.coulomb_convention != "volts" && pf.coulomb_convention != "newtons")
            throw SchemaError(ctx + ": coulomb_units must be 'volts' or 'newtons'");
    }
    const bool volts = pf.coulomb_convention == "volts";
    CraneParams& p = pf.params;
    if (j.contains("masses")) {
        const auto& m = j.at("masses");
        check_keys(m, {"rail", "trolley", "payload"}, ctx + ".masses");
        p.m_rail = get_num(m, "rail", p.m_rail, ctx);
        p.m_trolley = get_num(m, "trolley", p.m_trolley, ctx);
        p.m_payload = get_num(m, "payload", p.m_payload, ctx);
    }
    p.gravity = get_num(j, "gravity", p.gravity, ctx);
    p.u_sat = get_num(j, "u_sat", p.u_sat, ctx);
    if (!j.contains("axes")) throw SchemaError(ctx + ": missing 'axes'");
    const auto& axes = j.at("axes");
    check_keys(axes, {"x", "y", "l"}, ctx + ".axes");
    auto load_linear = [&](const ordered_json& a, AxisParams& ax, const std::string& c) {
        check_keys(a, {"radius", "pos_min", "pos_max", "gain", "inertia", "viscous_pos",
                       "viscous_neg", "coulomb_pos", "coulomb_neg"},
                   c);
        ax.radius = require_num(a, "radius", c);
        ax.pos_min = require_num(a, "pos_min", c);
        ax.pos_max = require_num(a, "pos_max", c);
        ax.gain = require_num(a, "gain", c);
        ax.inertia = get_num(a, "inertia", 0.0, c);
        ax.friction.viscous_pos = get_num(a, "viscous_pos", 0.0, c);
        ax.friction.viscous_neg = get_num(a, "viscous_neg", 0.0, c);
        const double s = volts ? ax.gain : 1.0;
        if (!a.contains("coulomb_pos") || !a.contains("coulomb_neg"))
            throw SchemaError(c + ": missing Coulomb maps");
        ax.friction.coulomb_pos =
            poly_from_json(a.at("coulomb_pos"), ax.pos_min, ax.pos_max, s, c);
        ax.friction.coulomb_neg =
            poly_from_json(a.at("coulomb_neg"), ax.pos_min, ax.pos_max, s, c);
    };
    if (!axes.contains("x") || !axes.contains("y") || !axes.contains("l"))
        throw SchemaError(ctx + ": axes must define x, y and l");
    load_linear(axes.at("x"), p.x, ctx + ".axes.x");
    load_linear(axes.at("y"), p.y, ctx + ".axes.y");
    {
        const auto& a = axes.at("l");
        check_keys(a, {"radius", "pos_min", "pos_max", "gain", "inertia", "viscous",
                       "coulomb"},
                   ctx + ".axes.l");
        p.l.radius = require_num(a, "radius", ctx);
        p.l.pos_min = require_num(a, "pos_min", ctx);
        p.l.pos_max = require_num(a, "pos_max", ctx);
        p.l.gain = require_num(a, "gain", ctx);
        p.l.inertia = get_num(a, "inertia", 0.0, ctx);
        const double visc = get_num(a, "viscous", 0.0, ctx);
        p.l.friction.viscous_pos = visc;
        p.l.friction.viscous_neg = visc;
        const double s = volts ? p.l.gain : 1.0;
        const double coul = get_num(a, "coulomb", 0.0, ctx) * s;
        p.l.friction.coulomb_pos = Polynomial4::constant(coul, p.l.pos_min, p.l.pos_max);
        p.l.friction.coulomb_neg = Polynomial4::constant(coul, p.l.pos_min, p.l.pos_max);
    }
    if (j.contains("swing_damping")) {
        const auto& s = j.at("swing_damping");
        check_keys(s, {"alpha", "beta"}, ctx + ".swing_damping");
        p.d_alpha = get_num(s, "alpha", 0.0, ctx);
        p.d_beta = get_num(s, "beta", 0.0, ctx);
    }
    if (j.contains("encoder"))
        pf.encoder = encoder_from_json(j.at("encoder"), ctx + ".encoder");
    pf.complete = j.value("complete", true);
    p.validate();
    return pf;
}

Axis axis_from_name(const std::string& n, const std::string& ctx) {
    if (n == "x") return Axis::X;
    if (n == "y") return Axis::Y;
    if (n == "l") return Axis::L;
    throw SchemaError(ctx + ": unknown axis '" + n + "'");
}

} // namespace

void atomic_write_text(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        if (!out.good()) {
            out.close();
            fs::remove(tmp);
            throw Error("failed writing " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

void write_trajectory_csv(const Trajectory& traj, const fs::path& path) {
    std::string out;
    out.reserve(traj.size() * 200);
    out += "t,x_t,dx_t,y_t,dy_t,L,dL,alpha,dalpha,beta,dbeta,q_x,q_y,q_l,u_x,u_y,u_l\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const CraneState& s = traj.state[i];
        const ModeVector& m = traj.mode[i];
        const InputVector& u = traj.input[i];
        out += fmt17(traj.t[i]);
        for (double v : s.to_array()) {
            out += ',';
            out += fmt17(v);
        }
        out += ',' + std::to_string(mode_code(m.x));
        out += ',' + std::to_string(mode_code(m.y));
        out += ',' + std::to_string(mode_code(m.l));
        out += ',' + fmt17(u.u_x) + ',' + fmt17(u.u_y) + ',' + fmt17(u.u_l);
        out += '\n';
    }
    atomic_write_text(path, out);
}

Trajectory read_trajectory_csv(const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::vector<std::string> expect = {"t",  "x_t",   "dx_t",   "y_t",  "dy_t",
                                             "L",  "dL",    "alpha",  "dalpha", "beta",
                                             "dbeta", "q_x", "q_y",   "q_l",  "u_x",
                                             "u_y", "u_l"};
    if (t.header != expect) throw SchemaError("unexpected trajectory CSV header");
    Trajectory traj;
    const std::size_t n = t.cols[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        traj.t.push_back(t.cols[0][i]);
        std::array<double, CraneState::kDim> arr;
        for (std::size_t j = 0; j < CraneState::kDim; ++j) arr[j] = t.cols[j + 1][i];
        traj.state.push_back(CraneState::from_array(arr));
        ModeVector m;
        m.x = mode_from_code(static_cast<int>(t.cols[11][i]));
        m.y = mode_from_code(static_cast<int>(t.cols[12][i]));
        m.l = mode_from_code(static_cast<int>(t.cols[13][i]));
        traj.mode.push_back(m);
        traj.input.push_back({t.cols[14][i], t.cols[15][i], t.cols[16][i]});
    }
    return traj;
}

void write_measurement_csv(const MeasurementRecord& rec, const fs::path& path) {
    std::string out = "t,u_x,u_y,u_l,x_t,y_t,L,alpha,beta\n";
    out.reserve(rec.size() * 120);
    for (std::size_t i = 0; i < rec.size(); ++i) {
        out += fmt17(rec.t[i]) + ',' + fmt17(rec.u_x[i]) + ',' + fmt17(rec.u_y[i]) +
               ',' + fmt17(rec.u_l[i]) + ',' + fmt17(rec.x_t[i]) + ',' +
               fmt17(rec.y_t[i]) + ',' + fmt17(rec.L[i]) + ',' + fmt17(rec.alpha[i]) +
               ',' + fmt17(rec.beta[i]) + '\n';
    }
    atomic_write_text(path, out);
}

MeasurementRecord read_measurement_csv(const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::vector<std::string> expect = {"t",   "u_x", "u_y", "u_l", "x_t",
                                             "y_t", "L",   "alpha", "beta"};
    if (t.header != expect) throw SchemaError("unexpected measurement CSV header");
    MeasurementRecord rec;
    rec.t = t.cols[0];
    rec.u_x = t.cols[1];
    rec.u_y = t.cols[2];
    rec.u_l = t.cols[3];
    rec.x_t = t.cols[4];
    rec.y_t = t.cols[5];
    rec.L = t.cols[6];
    rec.alpha = t.cols[7];
    rec.beta = t.cols[8];
    if (rec.t.size() >= 2) rec.dt = rec.t[1] - rec.t[0];
    return rec;
}

void write_breakaway_csv(const BreakawayDataset& ds, const fs::path& path) {
    std::string out = "x,y,u_x_pos,u_x_neg,u_y_pos,u_y_neg\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += fmt17(ds.x[i]) + ',' + fmt17(ds.y[i]) + ',' + fmt17(ds.ux_pos[i]) + ',' +
               fmt17(ds.ux_neg[i]) + ',' + fmt17(ds.uy_pos[i]) + ',' +
               fmt17(ds.uy_neg[i]) + '\n';
    }
    atomic_write_text(path, out);
}

BreakawayDataset read_breakaway_csv(const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::vector<std::string> expect = {"x",       "y",       "u_x_pos",
                                             "u_x_neg", "u_y_pos", "u_y_neg"};
    if (t.header != expect) throw SchemaError("unexpected breakaway CSV header");
    BreakawayDataset ds;
    ds.x = t.cols[0];
    ds.y = t.cols[1];
    ds.ux_pos = t.cols[2];
    ds.ux_neg = t.cols[3];
    ds.uy_pos = t.cols[4];
    ds.uy_neg = t.cols[5];
    return ds;
}

ParamsFile load_params_file(const fs::path& path) {
    return params_from_json(parse_file(path), path.filename().string());
}

void save_params_file(const ParamsFile& pf, const fs::path& path) {
    atomic_write_text(path, params_to_json(pf).dump(2) + "\n");
}

Scenario load_scenario(const fs::path& path) {
    const ordered_json j = parse_file(path);
    const std::string ctx = path.filename().string();
    check_keys(j, {"name", "params", "initial_state", "input", "sim", "rmse_axis"}, ctx);
    Scenario sc;
    sc.name = j.value("name", std::string("scenario"));
    if (!j.contains("params")) throw SchemaError(ctx + ": missing 'params'");
    sc.params = params_from_json(j.at("params"), ctx + ".params").params;

    if (j.contains("initial_state")) {
        const auto& st = j.at("initial_state");
        check_keys(st, {"x_t", "dx_t", "y_t", "dy_t", "L", "dL", "alpha", "dalpha",
                        "beta", "dbeta"},
                   ctx + ".initial_state");
        CraneState& s = sc.initial_state;
        s.x_t = get_num(st, "x_t", s.x_t, ctx);
        s.dx_t = get_num(st, "dx_t", s.dx_t, ctx);
        s.y_t = get_num(st, "y_t", s.y_t, ctx);
        s.dy_t = get_num(st, "dy_t", s.dy_t, ctx);
        s.L = get_num(st, "L", s.L, ctx);
        s.dL = get_num(st, "dL", s.dL, ctx);
        s.alpha = get_num(st, "alpha", s.alpha, ctx);
        s.dalpha = get_num(st, "dalpha", s.dalpha, ctx);
        s.beta = get_num(st, "beta", s.beta, ctx);
        s.dbeta = get_num(st, "dbeta", s.dbeta, ctx);
    }
    if (j.contains("input")) {
        const auto& in = j.at("input");
        check_keys(in, {"x", "y", "l"}, ctx + ".input");
        if (in.contains("x")) sc.input.x = signal_from_json(in.at("x"), ctx + ".input.x");
        if (in.contains("y")) sc.input.y = signal_from_json(in.at("y"), ctx + ".input.y");
        if (in.contains("l")) sc.input.l = signal_from_json(in.at("l"), ctx + ".input.l");
    }
    if (j.contains("sim")) {
        const auto& sm = j.at("sim");
        check_keys(sm, {"rel_tol", "abs_tol", "event_time_tol", "max_step", "t_end",
                        "output_dt", "model", "tanh_k", "frozen_axes"},
                   ctx + ".sim");
        SimConfig& c = sc.sim;
        c.rel_tol = get_num(sm, "rel_tol", c.rel_tol, ctx);
        c.abs_tol = get_num(sm, "abs_tol", c.abs_tol, ctx);
        c.event_time_tol = get_num(sm, "event_time_tol", c.event_time_tol, ctx);
        c.max_step = get_num(sm, "max_step", c.max_step, ctx);
        c.t_end = get_num(sm, "t_end", c.t_end, ctx);
        c.output_dt = get_num(sm, "output_dt", c.output_dt, ctx);
        if (sm.contains("model")) {
            const std::string m = sm.at("model").get<std::string>();
            if (m == "hybrid")
                c.model = SimModel::Hybrid;
            else if (m == "tanh")
                c.model = SimModel::Tanh;
            else
                throw SchemaError(ctx + ": model must be 'hybrid' or 'tanh'");
        }
        c.tanh_k = get_num(sm, "tanh_k", c.tanh_k, ctx);
        if (sm.contains("frozen_axes")) {
            if (!sm.at("frozen_axes").is_array())
                throw SchemaError(ctx + ": frozen_axes must be an array");
            for (const auto& a : sm.at("frozen_axes"))
                c.frozen[static_cast<int>(
                    axis_from_name(a.get<std::string>(), ctx))] = true;
        }
    }
    if (j.contains("rmse_axis"))
        sc.rmse_axis = axis_from_name(j.at("rmse_axis").get<std::string>(), ctx);
    sc.params.validate();
    sc.sim.validate();
    return sc;
}

std::string scenario_to_text(const Scenario& sc) {
    ordered_json j;
    j["name"] = sc.name;
    ParamsFile pf;
    pf.params = sc.params;
    pf.coulomb_convention = "newtons";
    ordered_json pj = params_to_json(pf);
    pj.erase("encoder");
    pj.erase("complete");
    j["params"] = pj;
    const CraneState& s = sc.initial_state;
    j["initial_state"] = {{"x_t", s.x_t},     {"dx_t", s.dx_t}, {"y_t", s.y_t},
                          {"dy_t", s.dy_t},   {"L", s.L},       {"dL", s.dL},
                          {"alpha", s.alpha}, {"dalpha", s.dalpha},
                          {"beta", s.beta},   {"dbeta", s.dbeta}};
    j["input"] = {{"x", signal_to_json(sc.input.x)},
                  {"y", signal_to_json(sc.input.y)},
                  {"l", signal_to_json(sc.input.l)}};
    const SimConfig& c = sc.sim;
    ordered_json fz = ordered_json::array();
    for (Axis a : kAllAxes)
        if (c.frozen[static_cast<int>(a)]) fz.push_back(axis_name(a));
    j["sim"] = {{"rel_tol", c.rel_tol},
                {"abs_tol", c.abs_tol},
                {"event_time_tol", c.event_time_tol},
                {"max_step", c.max_step},
                {"t_end", c.t_end},
                {"output_dt", c.output_dt},
                {"model", c.model == SimModel::Hybrid ? "hybrid" : "tanh"},
                {"tanh_k", c.tanh_k},
                {"frozen_axes", fz}};
    j["rmse_axis"] = axis_name(sc.rmse_axis);
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& sc, const fs::path& path) {
    atomic_write_text(path, scenario_to_text(sc));
}

void save_dataset(const SynthSuite& suite, const fs::path& dir) {
    fs::create_directories(dir);
    ordered_json manifest;
    manifest["quantized"] = suite.info.quantized;
    manifest["known"] = {{"m_rail", suite.info.m_rail},
                         {"m_trolley", suite.info.m_trolley},
                         {"gravity", suite.info.gravity},
                         {"u_sat", suite.info.u_sat},
                         {"radius_x", suite.info.radius_x},
                         {"radius_y", suite.info.radius_y},
                         {"radius_l", suite.info.radius_l},
                         {"x_min", suite.info.x_min},
                         {"x_max", suite.info.x_max},
                         {"y_min", suite.info.y_min},
                         {"y_max", suite.info.y_max},
                         {"l_min", suite.info.l_min},
                         {"l_max", suite.info.l_max}};
    manifest["encoder"] = encoder_to_json(suite.info.encoder);
    ordered_json recs = ordered_json::array();
    std::map<std::string, int> counters;
    for (const auto& rec : suite.records) {
        char name[128];
        std::snprintf(name, sizeof name, "%s_%02d.csv", rec.kind.c_str(),
                      counters[rec.kind]++);
        write_measurement_csv(rec, dir / name);
        recs.push_back({{"file", name}, {"kind", rec.kind}, {"mass", rec.mass}});
    }
    manifest["records"] = recs;
    write_breakaway_csv(suite.breakaway, dir / "xy_breakaway.csv");
    manifest["breakaway_file"] = "xy_breakaway.csv";
    atomic_write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& dir) {
    const ordered_json j = parse_file(dir / "manifest.json");
    check_keys(j, {"quantized", "known", "encoder", "records", "breakaway_file"},
               "manifest.json");
    Dataset ds;
    ds.info.quantized = j.value("quantized", true);
    if (j.contains("known")) {
        const auto& k = j.at("known");
        check_keys(k, {"m_rail", "m_trolley", "gravity", "u_sat", "radius_x", "radius_y",
                       "radius_l", "x_min", "x_max", "y_min", "y_max", "l_min", "l_max"},
                   "manifest.known");
        ds.info.m_rail = get_num(k, "m_rail", ds.info.m_rail, "known");
        ds.info.m_trolley = get_num(k, "m_trolley", ds.info.m_trolley, "known");
        ds.info.gravity = get_num(k, "gravity", ds.info.gravity, "known");
        ds.info.u_sat = get_num(k, "u_sat", ds.info.u_sat, "known");
        ds.info.radius_x = get_num(k, "radius_x", ds.info.radius_x, "known");
        ds.info.radius_y = get_num(k, "radius_y", ds.info.radius_y, "known");
        ds.info.radius_l = get_num(k, "radius_l", ds.info.radius_l, "known");
        ds.info.x_min = get_num(k, "x_min", ds.info.x_min, "known");
        ds.info.x_max = get_num(k, "x_max", ds.info.x_max, "known");
        ds.info.y_min = get_num(k, "y_min", ds.info.y_min, "known");
        ds.info.y_max = get_num(k, "y_max", ds.info.y_max, "known");
        ds.info.l_min = get_num(k, "l_min", ds.info.l_min, "known");
        ds.info.l_max = get_num(k, "l_max", ds.info.l_max, "known");
    }
    if (j.contains("encoder"))
        ds.info.encoder = encoder_from_json(j.at("encoder"), "manifest.encoder");
    if (!j.contains("records")) throw SchemaError("manifest.json: missing 'records'");
    for (const auto& r : j.at("records")) {
        check_keys(r, {"file", "kind", "mass"}, "manifest.records[]");
        MeasurementRecord rec =
            read_measurement_csv(dir / r.at("file").get<std::string>());
        rec.kind = r.at("kind").get<std::string>();
        rec.mass = r.value("mass", 0.0);
        rec.quantized = ds.info.quantized;
        ds.records.push_back(std::move(rec));
    }
    if (j.contains("breakaway_file"))
        ds.breakaway = read_breakaway_csv(dir / j.at("breakaway_file").get<std::string>());
    return ds;
}

SuiteOptions load_suite_options(const fs::path& path) {
    const ordered_json j = parse_file(path);
    const std::string ctx = path.filename().string();
    check_keys(j, {"loaded_masses", "quasistatic_repeats", "swing_records", "swing_mass",
                   "swing_duration", "motion_duration", "quantize", "seed",
                   "oracle_noise", "sampling"},
               ctx);
    SuiteOptions opt;
    if (j.contains("loaded_masses"))
        opt.loaded_masses = j.at("loaded_masses").get<std::vector<double>>();
    opt.quasistatic_repeats =
        static_cast<int>(get_num(j, "quasistatic_repeats", opt.quasistatic_repeats, ctx));
    opt.swing_records = static_cast<int>(get_num(j, "swing_records", opt.swing_records, ctx));
    opt.swing_mass = get_num(j, "swing_mass", opt.swing_mass, ctx);
    opt.swing_duration = get_num(j, "swing_duration", opt.swing_duration, ctx);
    opt.motion_duration = get_num(j, "motion_duration", opt.motion_duration, ctx);
    if (j.contains("quantize")) opt.quantize = j.at("quantize").get<bool>();
    opt.seed = static_cast<std::uint64_t>(get_num(j, "seed", 0.0, ctx));
    opt.oracle_noise = get_num(j, "oracle_noise", opt.oracle_noise, ctx);
    if (j.contains("sampling")) {
        const auto& s = j.at("sampling");
        check_keys(s, {"initial_points", "candidate_grid", "std_threshold", "max_points",
                       "time_budget_s", "margin"},
                   ctx + ".sampling");
        opt.sampling.initial_points =
            static_cast<int>(get_num(s, "initial_points", opt.sampling.initial_points, ctx));
        opt.sampling.candidate_grid =
            static_cast<int>(get_num(s, "candidate_grid", opt.sampling.candidate_grid, ctx));
        opt.sampling.std_threshold =
            get_num(s, "std_threshold", opt.sampling.std_threshold, ctx);
        opt.sampling.max_points =
            static_cast<int>(get_num(s, "max_points", opt.sampling.max_points, ctx));
        opt.sampling.time_budget_s =
            get_num(s, "time_budget_s", opt.sampling.time_budget_s, ctx);
        opt.sampling.margin = get_num(s, "margin", opt.sampling.margin, ctx);
    }
    return opt;
}

namespace {

ordered_json ls_to_json(const LsResult& ls) {
    ordered_json j;
    j["labels"] = ls.labels;
    j["estimates"] = ls.estimates;
    j["residual_rms"] = ls.residual_rms;
    ordered_json corr = ordered_json::array();
    for (std::size_t i = 0; i < ls.correlation.rows; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < ls.correlation.cols; ++k)
            row.push_back(ls.correlation.at(i, k));
        corr.push_back(row);
    }
    j["correlation"] = corr;
    j["max_offdiag_correlation"] = ls.max_offdiag();
    return j;
}

} // namespace

void save_estimated_params(const PipelineResult& res, const fs::path& path) {
    ParamsFile pf;
    pf.params = res.params;
    pf.coulomb_convention = "volts";
    pf.complete = res.complete;
    save_params_file(pf, path);
}

void save_diagnostics(const PipelineResult& res, const fs::path& path) {
    ordered_json j;
    j["steps_done"] = res.steps_done;
    j["complete"] = res.complete;
    if (res.rope) {
        ordered_json r;
        r["p1"] = res.rope->p1;
        r["p2"] = res.rope->p2;
        r["p3"] = res.rope->p3;
        r["p4"] = res.rope->p4;
        r["p3_samples"] = res.rope->p3_samples;
        r["noload_ls"] = ls_to_json(res.rope->noload);
        r["loaded_ls"] = ls_to_json(res.rope->loaded);
        if (!res.rope->joint.estimates.empty())
            r["joint_ls"] = ls_to_json(res.rope->joint);
        j["rope"] = r;
    }
    auto axis_json = [&](const AxisEstimate& est) {
        ordered_json a;
        a["acc_coeff"] = est.acc_coeff;
        a["p7_pos"] = est.p7_pos;
        a["p7_neg"] = est.p7_neg;
        a["ls"] = ls_to_json(est.ls);
        return a;
    };
    if (res.axis_x) j["axis_x"] = axis_json(*res.axis_x);
    if (res.axis_y) j["axis_y"] = axis_json(*res.axis_y);
    if (!res.gpr.empty()) {
        const char* names[] = {"x_pos", "x_neg", "y_pos", "y_neg"};
        ordered_json g;
        for (std::size_t i = 0; i < res.gpr.size() && i < 4; ++i) {
            g[names[i]] = {{"sigma_f", res.gpr[i].hyper.sigma_f},
                           {"length", res.gpr[i].hyper.length},
                           {"sigma_n", res.gpr[i].hyper.sigma_n},
                           {"poly_max_deviation", res.gpr[i].poly_max_deviation}};
        }
        j["gpr"] = g;
    }
    if (res.swing) {
        j["swing"] = {{"d_alpha", res.swing->d_alpha},
                      {"d_beta", res.swing->d_beta},
                      {"ls_alpha", ls_to_json(res.swing->ls_alpha)},
                      {"ls_beta", ls_to_json(res.swing->ls_beta)}};
    }
    atomic_write_text(path, j.dump(2) + "\n");
}

} // namespace crane3d
