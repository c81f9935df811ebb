#include "modeswim/config.hpp"

#include <cstdint>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <utility>

#include "modeswim/error.hpp"

namespace modeswim::config {

namespace detail {
std::span<const std::pair<std::string_view, std::string_view>> fixture_table();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError("'" + std::string(text) + "' is not a finite number");
    }
    return v;
}

int parse_int(std::string_view text) {
    const double v = parse_number(text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("'" + std::string(trim(text)) + "' is not an integer");
    return static_cast<int>(v);
}

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += exact(values[i]);
    }
    return out;
}

std::string planform_name(fem::Planform p) {
    switch (p) {
        case fem::Planform::rectangle: return "rectangle";
        case fem::Planform::circle: return "circle";
        case fem::Planform::cross: return "cross";
    }
    return "rectangle";
}

std::string edge_name(fem::Edge e) {
    switch (e) {
        case fem::Edge::left: return "left";
        case fem::Edge::right: return "right";
        case fem::Edge::bottom: return "bottom";
        case fem::Edge::top: return "top";
    }
    return "left";
}

using Setter = std::function<void(RunConfig&, std::string_view)>;
using KeyTable = std::map<std::string, Setter, std::less<>>;

void layer_keys(KeyTable& t, std::vector<laminate::Layer> RunConfig::*list) {
    t["thickness"] = [list](RunConfig& c, std::string_view v) { (c.*list).back().thickness = parse_number(v); };
    t["density"] = [list](RunConfig& c, std::string_view v) { (c.*list).back().density = parse_number(v); };
    t["modulus"] = [list](RunConfig& c, std::string_view v) { (c.*list).back().elastic_modulus = parse_number(v); };
    t["poisson"] = [list](RunConfig& c, std::string_view v) { (c.*list).back().poisson_ratio = parse_number(v); };
}

const std::map<std::string, KeyTable, std::less<>>& sections() {
    static const auto table = [] {
        std::map<std::string, KeyTable, std::less<>> s;
        auto& model = s["model"];
        model["name"] = [](RunConfig& c, std::string_view v) { c.name = std::string(v); };
        model["kind"] = [](RunConfig& c, std::string_view v) {
            if (v == "beam") c.kind = ModelKind::beam;
            else if (v == "plate") c.kind = ModelKind::plate;
            else throw ConfigError("kind must be beam or plate");
        };

        auto& geo = s["geometry"];
        geo["planform"] = [](RunConfig& c, std::string_view v) {
            if (v == "rectangle") c.geometry.planform = fem::Planform::rectangle;
            else if (v == "circle") c.geometry.planform = fem::Planform::circle;
            else if (v == "cross") c.geometry.planform = fem::Planform::cross;
            else throw ConfigError("planform must be rectangle, circle or cross");
        };
        geo["a"] = [](RunConfig& c, std::string_view v) { c.geometry.a = parse_number(v); };
        geo["b"] = [](RunConfig& c, std::string_view v) { c.geometry.b = parse_number(v); };
        geo["radius"] = [](RunConfig& c, std::string_view v) { c.geometry.radius = parse_number(v); };
        geo["overall_length"] = [](RunConfig& c, std::string_view v) { c.geometry.overall_length = parse_number(v); };
        geo["overall_width"] = [](RunConfig& c, std::string_view v) { c.geometry.overall_width = parse_number(v); };
        geo["arm_width"] = [](RunConfig& c, std::string_view v) { c.geometry.arm_width = parse_number(v); };
        geo["heading_deg"] = [](RunConfig& c, std::string_view v) { c.geometry.heading_deg = parse_number(v); };

        s["mesh"]["element_size"] = [](RunConfig& c, std::string_view v) { c.element_size = parse_number(v); };

        layer_keys(s["base_layer"], &RunConfig::base_layers);
        layer_keys(s["actuator_layer"], &RunConfig::actuator_layers);

        auto& patch = s["patch"];
        auto pnum = [](double PatchSpec::*m) {
            return [m](RunConfig& c, std::string_view v) { c.patches.back().*m = parse_number(v); };
        };
        patch["center_x"] = pnum(&PatchSpec::center_x);
        patch["center_y"] = pnum(&PatchSpec::center_y);
        patch["length"] = pnum(&PatchSpec::length);
        patch["width"] = pnum(&PatchSpec::width);
        patch["active_length"] = pnum(&PatchSpec::active_length);
        patch["active_width"] = pnum(&PatchSpec::active_width);
        patch["amplitude"] = pnum(&PatchSpec::amplitude);
        patch["phase_deg"] = pnum(&PatchSpec::phase_deg);
        patch["axis"] = [](RunConfig& c, std::string_view v) {
            if (v != "x" && v != "y") throw ConfigError("axis must be x or y");
            c.patches.back().axis = v.front();
        };

        auto& bc = s["boundary"];
        bc["condition"] = [](RunConfig& c, std::string_view v) {
            if (v == "free") c.boundary.kind = fem::BoundaryCondition::Kind::free;
            else if (v == "simply_supported") c.boundary.kind = fem::BoundaryCondition::Kind::simply_supported;
            else if (v == "clamped") c.boundary.kind = fem::BoundaryCondition::Kind::clamped;
            else throw ConfigError("condition must be free, simply_supported or clamped");
        };
        bc["edges"] = [](RunConfig& c, std::string_view v) {
            c.boundary.edges.clear();
            std::string_view rest = v;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                const auto item = trim(rest.substr(0, comma));
                if (item == "left") c.boundary.edges.push_back(fem::Edge::left);
                else if (item == "right") c.boundary.edges.push_back(fem::Edge::right);
                else if (item == "bottom") c.boundary.edges.push_back(fem::Edge::bottom);
                else if (item == "top") c.boundary.edges.push_back(fem::Edge::top);
                else throw ConfigError("unknown edge '" + std::string(item) + "'");
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
        };

        auto& fl = s["fluid"];
        fl["density"] = [](RunConfig& c, std::string_view v) { c.fluid.density = parse_number(v); };
        fl["lambda"] = [](RunConfig& c, std::string_view v) { c.fluid.lambda = parse_number(v); };
        fl["calibrate_wet_f1"] = [](RunConfig& c, std::string_view v) { c.fluid.calibrate_wet_f1 = parse_number(v); };

        auto& sol = s["solver"];
        sol["modes"] = [](RunConfig& c, std::string_view v) { c.solver.modes = parse_int(v); };
        sol["shift_hz"] = [](RunConfig& c, std::string_view v) { c.solver.shift_hz = parse_number(v); };
        sol["degeneracy_tolerance"] = [](RunConfig& c, std::string_view v) {
            c.solver.degeneracy_tolerance = parse_number(v);
        };

        auto& dr = s["drive"];
        dr["frequencies"] = [](RunConfig& c, std::string_view v) { c.drive.frequencies_hz = parse_number_list(v); };
        dr["phases"] = [](RunConfig& c, std::string_view v) { c.drive.phases_deg = parse_number_list(v); };
        dr["damping_ratio"] = [](RunConfig& c, std::string_view v) { c.drive.damping_ratio = parse_number(v); };

        auto& val = s["validation"];
        auto vnum = [](double ValidationSpec::*m) {
            return [m](RunConfig& c, std::string_view v) { c.validation.*m = parse_number(v); };
        };
        val["air_f1"] = vnum(&ValidationSpec::air_f1);
        val["air_f2"] = vnum(&ValidationSpec::air_f2);
        val["measured_air_f1"] = vnum(&ValidationSpec::measured_air_f1);
        val["measured_air_f2"] = vnum(&ValidationSpec::measured_air_f2);
        val["wet_f1"] = vnum(&ValidationSpec::wet_f1);
        val["wet_f2"] = vnum(&ValidationSpec::wet_f2);
        val["measured_wet_f1"] = vnum(&ValidationSpec::measured_wet_f1);
        val["measured_wet_f2"] = vnum(&ValidationSpec::measured_wet_f2);
        val["tolerance_pct"] = vnum(&ValidationSpec::tolerance_pct);
        val["measured_tolerance_pct"] = vnum(&ValidationSpec::measured_tolerance_pct);
        val["measured_wet_factor"] = vnum(&ValidationSpec::measured_wet_factor);

        auto& out = s["output"];
        out["grid_nx"] = [](RunConfig& c, std::string_view v) { c.output.grid_nx = parse_int(v); };
        out["grid_ny"] = [](RunConfig& c, std::string_view v) { c.output.grid_ny = parse_int(v); };
        return s;
    }();
    return table;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

fem::Footprint PatchSpec::layup_footprint() const {
    const double hx = 0.5 * (axis == 'x' ? length : width);
    const double hy = 0.5 * (axis == 'x' ? width : length);
    return {center_x - hx, center_y - hy, center_x + hx, center_y + hy};
}

fem::Footprint PatchSpec::active_footprint() const {
    const double hx = 0.5 * (axis == 'x' ? active_length : active_width);
    const double hy = 0.5 * (axis == 'x' ? active_width : active_length);
    return {center_x - hx, center_y - hy, center_x + hx, center_y + hy};
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    std::string_view rest = trim(text);
    if (rest.empty()) return out;
    while (true) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        if (item.find(':') != std::string_view::npos) {
            const auto c1 = item.find(':');
            const auto c2 = item.find(':', c1 + 1);
            if (c2 == std::string_view::npos) throw ConfigError("range '" + std::string(item) + "' needs start:stop:step");
            const double a = parse_number(item.substr(0, c1));
            const double b = parse_number(item.substr(c1 + 1, c2 - c1 - 1));
            const double step = parse_number(item.substr(c2 + 1));
            if (!(step > 0.0) || b < a) throw ConfigError("range '" + std::string(item) + "' is empty or has a non-positive step");
            const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
            if (n > 100000) throw ConfigError("range '" + std::string(item) + "' is too long");
            for (long k = 0; k <= n; ++k) out.push_back(a + static_cast<double>(k) * step);
        } else {
            out.push_back(parse_number(item));
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

RunConfig parse(std::string_view text) {
    RunConfig c;
    const auto& table = sections();
    const KeyTable* current = nullptr;
    std::string section;
    std::size_t line_no = 0;
    std::map<std::string, int> seen_keys;  // per-section instance duplicate detection

    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            const auto it = table.find(section);
            if (it == table.end()) throw ConfigError(where + ": unknown section [" + section + "]");
            current = &it->second;
            seen_keys.clear();
            if (section == "base_layer") c.base_layers.emplace_back();
            if (section == "actuator_layer") c.actuator_layers.emplace_back();
            if (section == "patch") c.patches.emplace_back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (!current) throw ConfigError(where + ": key '" + key + "' appears before any section");
        const auto setter = current->find(key);
        if (setter == current->end()) throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
        if (seen_keys[key]++) throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
        try {
            setter->second(c, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ", key '" + key + "': " + e.what());
        }
    }
    validate(c);
    return c;
}

RunConfig load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void validate(const RunConfig& c) {
    try {
        c.geometry.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("[geometry] ") + e.what());
    }
    require(c.element_size > 0.0, "[mesh] element_size must be positive");
    require(!c.base_layers.empty(), "at least one [base_layer] is required");
    for (const auto* list : {&c.base_layers, &c.actuator_layers}) {
        for (const auto& l : *list) {
            try {
                laminate::validate(l);
            } catch (const DomainError& e) {
                throw ConfigError(std::string("layer: ") + e.what());
            }
        }
    }
    require(c.patches.size() <= 2, "at most two [patch] sections are supported");
    for (std::size_t i = 0; i < c.patches.size(); ++i) {
        const auto& p = c.patches[i];
        const std::string tag = "[patch] #" + std::to_string(i + 1) + ": ";
        require(p.length > 0.0 && p.width > 0.0, tag + "length and width must be positive");
        require(p.active_length > 0.0 && p.active_width > 0.0, tag + "active area must be positive");
        require(p.active_length <= p.length && p.active_width <= p.width, tag + "active area exceeds the patch");
        require(p.amplitude >= 0.0, tag + "amplitude must be >= 0");
        const auto f = p.layup_footprint();
        for (auto [x, y] : {std::pair{f.x0, f.y0}, {f.x1, f.y0}, {f.x1, f.y1}, {f.x0, f.y1}, {p.center_x, p.center_y}}) {
            require(c.geometry.contains(x, y), tag + "footprint lies outside the planform");
        }
    }
    if (c.boundary.kind == fem::BoundaryCondition::Kind::clamped) {
        require(c.geometry.planform == fem::Planform::rectangle, "[boundary] edge specs need a rectangular planform");
        require(!c.boundary.edges.empty(), "[boundary] clamped needs edges");
    } else {
        require(c.boundary.edges.empty(), "[boundary] edges are only valid with condition = clamped");
    }
    require(c.fluid.density >= 0.0, "[fluid] density must be >= 0");
    require(c.fluid.lambda >= 0.0, "[fluid] lambda must be >= 0");
    if (c.fluid.calibrate_wet_f1) require(*c.fluid.calibrate_wet_f1 > 0.0, "[fluid] calibrate_wet_f1 must be positive");
    require(c.solver.modes >= 1, "[solver] modes must be >= 1");
    require(c.solver.shift_hz >= 0.0, "[solver] shift_hz must be >= 0");
    require(c.solver.degeneracy_tolerance >= 0.0 && c.solver.degeneracy_tolerance < 0.1,
            "[solver] degeneracy_tolerance must lie in [0, 0.1)");
    for (double f : c.drive.frequencies_hz) require(f > 0.0, "[drive] frequencies must be positive");
    require(c.drive.damping_ratio > 0.0 && c.drive.damping_ratio < 1.0, "[drive] damping_ratio must lie in (0, 1)");
    const auto& v = c.validation;
    require(v.tolerance_pct > 0.0 && v.measured_tolerance_pct > 0.0 && v.measured_wet_factor >= 1.0,
            "[validation] tolerances must be positive and the wet factor >= 1");
    if (v.air_f1 > 0.0 && v.air_f2 > 0.0) require(v.air_f1 < v.air_f2, "[validation] air targets must be ascending");
    if (v.wet_f1 > 0.0 && v.wet_f2 > 0.0) require(v.wet_f1 < v.wet_f2, "[validation] wet targets must be ascending");
    if (c.fluid.calibrate_wet_f1 && v.air_f1 > 0.0) {
        require(*c.fluid.calibrate_wet_f1 < v.air_f1, "[fluid] calibration target must lie below the air frequency");
    }
    require(c.output.grid_nx >= 2 && c.output.grid_ny >= 2, "[output] grid sizes must be >= 2");
    if (c.kind == ModelKind::beam) {
        require(c.geometry.planform == fem::Planform::rectangle, "beam models need a rectangular planform");
        require(c.boundary.kind == fem::BoundaryCondition::Kind::clamped, "beam models need a clamped edge");
    }
}

std::string serialize(const RunConfig& c) {
    std::ostringstream os;
    os << "[model]\nname = " << c.name << "\nkind = " << (c.kind == ModelKind::beam ? "beam" : "plate") << "\n\n";
    const auto& g = c.geometry;
    os << "[geometry]\nplanform = " << planform_name(g.planform) << '\n';
    switch (g.planform) {
        case fem::Planform::rectangle: os << "a = " << exact(g.a) << "\nb = " << exact(g.b) << '\n'; break;
        case fem::Planform::circle: os << "radius = " << exact(g.radius) << '\n'; break;
        case fem::Planform::cross:
            os << "overall_length = " << exact(g.overall_length) << "\noverall_width = " << exact(g.overall_width)
               << "\narm_width = " << exact(g.arm_width) << '\n';
            break;
    }
    os << "heading_deg = " << exact(g.heading_deg) << "\n\n";
    os << "[mesh]\nelement_size = " << exact(c.element_size) << "\n\n";
    auto layers = [&](const char* name, const std::vector<laminate::Layer>& list) {
        for (const auto& l : list) {
            os << '[' << name << "]\nthickness = " << exact(l.thickness) << "\ndensity = " << exact(l.density)
               << "\nmodulus = " << exact(l.elastic_modulus) << "\npoisson = " << exact(l.poisson_ratio) << "\n\n";
        }
    };
    layers("base_layer", c.base_layers);
    layers("actuator_layer", c.actuator_layers);
    for (const auto& p : c.patches) {
        os << "[patch]\ncenter_x = " << exact(p.center_x) << "\ncenter_y = " << exact(p.center_y)
           << "\nlength = " << exact(p.length) << "\nwidth = " << exact(p.width)
           << "\nactive_length = " << exact(p.active_length) << "\nactive_width = " << exact(p.active_width)
           << "\naxis = " << p.axis << "\namplitude = " << exact(p.amplitude) << "\nphase_deg = " << exact(p.phase_deg)
           << "\n\n";
    }
    os << "[boundary]\ncondition = ";
    switch (c.boundary.kind) {
        case fem::BoundaryCondition::Kind::free: os << "free\n"; break;
        case fem::BoundaryCondition::Kind::simply_supported: os << "simply_supported\n"; break;
        case fem::BoundaryCondition::Kind::clamped: {
            os << "clamped\nedges = ";
            for (std::size_t i = 0; i < c.boundary.edges.size(); ++i) os << (i ? ", " : "") << edge_name(c.boundary.edges[i]);
            os << '\n';
            break;
        }
    }
    os << "\n[fluid]\ndensity = " << exact(c.fluid.density) << "\nlambda = " << exact(c.fluid.lambda) << '\n';
    if (c.fluid.calibrate_wet_f1) os << "calibrate_wet_f1 = " << exact(*c.fluid.calibrate_wet_f1) << '\n';
    os << "\n[solver]\nmodes = " << c.solver.modes << "\nshift_hz = " << exact(c.solver.shift_hz)
       << "\ndegeneracy_tolerance = " << exact(c.solver.degeneracy_tolerance) << "\n\n";
    os << "[drive]\nfrequencies = " << join(c.drive.frequencies_hz) << "\nphases = " << join(c.drive.phases_deg)
       << "\ndamping_ratio = " << exact(c.drive.damping_ratio) << "\n\n";
    const auto& v = c.validation;
    os << "[validation]\nair_f1 = " << exact(v.air_f1) << "\nair_f2 = " << exact(v.air_f2)
       << "\nmeasured_air_f1 = " << exact(v.measured_air_f1) << "\nmeasured_air_f2 = " << exact(v.measured_air_f2)
       << "\nwet_f1 = " << exact(v.wet_f1) << "\nwet_f2 = " << exact(v.wet_f2)
       << "\nmeasured_wet_f1 = " << exact(v.measured_wet_f1) << "\nmeasured_wet_f2 = " << exact(v.measured_wet_f2)
       << "\ntolerance_pct = " << exact(v.tolerance_pct) << "\nmeasured_tolerance_pct = " << exact(v.measured_tolerance_pct)
       << "\nmeasured_wet_factor = " << exact(v.measured_wet_factor) << "\n\n";
    os << "[output]\ngrid_nx = " << c.output.grid_nx << "\ngrid_ny = " << c.output.grid_ny << '\n';
    return os.str();
}

std::string digest(const RunConfig& config) { return digest_text(serialize(config)); }

std::string digest_text(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::fixture_table()) out.emplace_back(name);
    return out;
}

std::string_view fixture_text(std::string_view name) {
    for (const auto& [n, text] : detail::fixture_table()) {
        if (n == name) return text;
    }
    throw ConfigError("unknown fixture '" + std::string(name) + "'");
}

RunConfig fixture(std::string_view name) {
    try {
        return parse(fixture_text(name));
    } catch (const ConfigError& e) {
        throw ConfigError("fixture " + std::string(name) + ": " + e.what());
    }
}

}  // namespace modeswim::config
