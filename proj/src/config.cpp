#include "bioheat/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "bioheat/errors.hpp"

namespace bioheat {

namespace {

struct Value {
    std::variant<bool, long long, double, std::string, std::vector<double>,
                 std::vector<std::string>>
        data;
    bool from_int_list = false;  // numeric lists remember integer-only spelling
};

using KvMap = std::map<std::string, Value>;

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char ch : key)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_')) return false;
    return true;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_number(const std::string& text, double* out, bool* is_int) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    std::size_t pos = 0;
    try {
        *out = std::stod(t, &pos);
    } catch (...) {
        return false;
    }
    if (pos != t.size()) return false;
    *is_int = t.find_first_of(".eEnN") == std::string::npos;  // no dot or exponent (or inf/nan)
    return true;
}

Value parse_value(const std::string& raw, const std::string& key) {
    const std::string text = trim(raw);
    if (text.empty()) throw ValidationError(key + ": missing value");
    Value v;
    if (text == "true" || text == "false") {
        v.data = (text == "true");
        return v;
    }
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw ValidationError(key + ": unterminated string");
        v.data = text.substr(1, text.size() - 2);
        return v;
    }
    if (text.front() == '[') {
        if (text.back() != ']') throw ValidationError(key + ": unterminated list");
        const std::string body = trim(text.substr(1, text.size() - 2));
        std::vector<std::string> items;
        std::string cur;
        bool in_quote = false;
        for (char ch : body) {
            if (ch == '"') in_quote = !in_quote;
            if (ch == ',' && !in_quote) {
                items.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        if (!trim(cur).empty()) items.push_back(trim(cur));
        if (!items.empty() && items.front().size() && items.front().front() == '"') {
            std::vector<std::string> list;
            for (const std::string& item : items) {
                if (item.size() < 2 || item.front() != '"' || item.back() != '"')
                    throw ValidationError(key + ": malformed string list");
                list.push_back(item.substr(1, item.size() - 2));
            }
            v.data = list;
            return v;
        }
        std::vector<double> list;
        bool all_int = true;
        for (const std::string& item : items) {
            double x = 0.0;
            bool is_int = false;
            if (!parse_number(item, &x, &is_int))
                throw ValidationError(key + ": malformed number in list");
            all_int = all_int && is_int;
            list.push_back(x);
        }
        v.data = list;
        v.from_int_list = all_int;
        return v;
    }
    double x = 0.0;
    bool is_int = false;
    if (parse_number(text, &x, &is_int)) {
        if (is_int)
            v.data = static_cast<long long>(std::llround(x));
        else
            v.data = x;
        return v;
    }
    // Bare words count as strings so command-line overrides such as
    // flags.ic_scaling=paper need no nested quoting.
    for (char ch : text)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_'))
            throw ValidationError(key + ": malformed value");
    v.data = text;
    return v;
}

// Strips a '#' comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_quote = !in_quote;
        if (line[i] == '#' && !in_quote) return line.substr(0, i);
    }
    return line;
}

KvMap parse_kv_text(const std::string& text) {
    KvMap map;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "config line %d: expected key = value", line_no);
            throw ValidationError(buf);
        }
        const std::string key = trim(body.substr(0, eq));
        if (!valid_key(key)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "config line %d: malformed key", line_no);
            throw ValidationError(buf);
        }
        map[key] = parse_value(body.substr(eq + 1), key);
    }
    return map;
}

// Typed accessors; every miss names the key.
struct Reader {
    KvMap map;
    std::set<std::string> seen;

    bool has(const std::string& key) {
        return map.count(key) != 0;
    }
    const Value* take(const std::string& key) {
        auto it = map.find(key);
        if (it == map.end()) return nullptr;
        seen.insert(key);
        return &it->second;
    }
    long long integer(const std::string& key, long long fallback) {
        const Value* v = take(key);
        if (!v) return fallback;
        if (const long long* i = std::get_if<long long>(&v->data)) return *i;
        throw ValidationError(key + ": expected an integer");
    }
    double number(const std::string& key, double fallback) {
        const Value* v = take(key);
        if (!v) return fallback;
        if (const long long* i = std::get_if<long long>(&v->data))
            return static_cast<double>(*i);
        if (const double* d = std::get_if<double>(&v->data)) return *d;
        throw ValidationError(key + ": expected a number");
    }
    bool boolean(const std::string& key, bool fallback) {
        const Value* v = take(key);
        if (!v) return fallback;
        if (const bool* b = std::get_if<bool>(&v->data)) return *b;
        throw ValidationError(key + ": expected true or false");
    }
    std::string text(const std::string& key, const std::string& fallback) {
        const Value* v = take(key);
        if (!v) return fallback;
        if (const std::string* s = std::get_if<std::string>(&v->data)) return *s;
        throw ValidationError(key + ": expected a quoted string");
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const Value* v = take(key);
        if (!v) return fallback;
        if (const std::vector<double>* l = std::get_if<std::vector<double>>(&v->data)) return *l;
        throw ValidationError(key + ": expected a list of numbers");
    }
    std::vector<std::string> texts(const std::string& key, std::vector<std::string> fallback) {
        const Value* v = take(key);
        if (!v) return fallback;
        if (const std::vector<std::string>* l = std::get_if<std::vector<std::string>>(&v->data))
            return *l;
        throw ValidationError(key + ": expected a list of strings");
    }
    void reject_unknown() const {
        for (const auto& [key, value] : map)
            if (!seen.count(key)) throw ValidationError(key + ": unknown key");
    }
};

ProfileSpec read_profile(Reader& r, const std::string& key, const ProfileSpec& fallback, int dim) {
    ProfileSpec spec = fallback;
    spec.kind = r.text(key + ".kind", fallback.kind);
    spec.value = r.number(key + ".value", fallback.value);
    spec.amplitude = r.number(key + ".amplitude", fallback.amplitude);
    spec.center = r.numbers(key + ".center", fallback.center);
    spec.width = r.number(key + ".width", fallback.width);
    validate_profile(spec, dim, key);
    return spec;
}

RunConfig build_config(Reader& r) {
    RunConfig cfg;
    cfg.dim = static_cast<int>(r.integer("cell.dim", cfg.dim));
    if (cfg.dim != 2 && cfg.dim != 3) throw ValidationError("cell.dim: must be 2 or 3");
    cfg.n = static_cast<int>(r.integer("cell.n", cfg.n));
    if (cfg.n < 1) throw ValidationError("cell.n: must be at least 1");

    const bool no_inclusion = r.boolean("cell.inclusion.none", false);
    std::vector<double> im_center(static_cast<std::size_t>(cfg.dim), 0.5);
    std::vector<double> im_halfwidth(static_cast<std::size_t>(cfg.dim), 0.25);
    InclusionSpec inc;
    inc.center = r.numbers("cell.inclusion.center", im_center);
    inc.halfwidth = r.numbers("cell.inclusion.halfwidth", im_halfwidth);
    if (!no_inclusion) cfg.inclusions.push_back(inc);

    const bool raw_mode = r.has("physics.rho") || r.has("physics.c") || r.has("physics.kappa") ||
                          r.has("physics.rho_b") || r.has("physics.c_b") ||
                          r.has("physics.kappa_b") || r.has("physics.omega_b");
    const bool direct_mode =
        r.has("physics.alpha") || r.has("physics.alpha_b") || r.has("physics.gamma");
    if (raw_mode && direct_mode)
        throw ValidationError("physics: give either alpha/alpha_b/gamma or the physiological set");
    if (raw_mode) {
        cfg.physics_raw = true;
        cfg.raw.rho = r.number("physics.rho", cfg.raw.rho);
        cfg.raw.c = r.number("physics.c", cfg.raw.c);
        cfg.raw.kappa = r.number("physics.kappa", cfg.raw.kappa);
        cfg.raw.rho_b = r.number("physics.rho_b", cfg.raw.rho_b);
        cfg.raw.c_b = r.number("physics.c_b", cfg.raw.c_b);
        cfg.raw.kappa_b = r.number("physics.kappa_b", cfg.raw.kappa_b);
        cfg.raw.omega_b = r.number("physics.omega_b", cfg.raw.omega_b);
        const std::string uses = r.text("physics.alpha_b_uses", "kappa_b");
        if (uses == "kappa_b")
            cfg.alpha_b_uses = AlphaBloodSource::kappa_b;
        else if (uses == "kappa")
            cfg.alpha_b_uses = AlphaBloodSource::kappa;
        else
            throw ValidationError("physics.alpha_b_uses: must be \"kappa_b\" or \"kappa\"");
        cfg.physics = derive_coefficients(cfg.raw, cfg.alpha_b_uses);
    } else {
        cfg.physics.alpha = r.number("physics.alpha", cfg.physics.alpha);
        cfg.physics.alpha_b = r.number("physics.alpha_b", cfg.physics.alpha_b);
        cfg.physics.gamma = r.number("physics.gamma", cfg.physics.gamma);
        if (!(cfg.physics.alpha > 0.0)) throw ValidationError("physics.alpha: must be positive");
        if (!(cfg.physics.alpha_b > 0.0))
            throw ValidationError("physics.alpha_b: must be positive");
        if (cfg.physics.gamma < 0.0)
            throw ValidationError("physics.gamma: must be non-negative");
    }

    ProfileSpec zero;
    ProfileSpec ramp;
    ramp.kind = "sine-product";
    ramp.amplitude = 1.0;
    ProfileSpec unit;
    unit.value = 1.0;
    cfg.f = read_profile(r, "data.f", zero, cfg.dim);
    cfg.f_b = read_profile(r, "data.f_b", zero, cfg.dim);
    cfg.h = read_profile(r, "data.h", ramp, cfg.dim);
    cfg.h_b = read_profile(r, "data.h_b", unit, cfg.dim);

    cfg.t_final = r.number("time.t_final", cfg.t_final);
    if (!(cfg.t_final > 0.0)) throw ValidationError("time.t_final: must be positive");
    cfg.steps = static_cast<int>(r.integer("time.steps", cfg.steps));
    if (cfg.steps < 1) throw ValidationError("time.steps: must be at least 1");

    const std::vector<double> eps_fallback{0.25, 0.125, 0.0625};
    const std::vector<double> eps_list = r.numbers("study.epsilon_list", eps_fallback);
    if (eps_list.empty()) throw ValidationError("study.epsilon_list: must not be empty");
    cfg.inv_eps.clear();
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double eps = eps_list[i];
        char item[64];
        std::snprintf(item, sizeof item, "study.epsilon_list[%zu]", i);
        if (!(eps > 0.0 && eps <= 1.0))
            throw ValidationError(std::string(item) + ": eps must lie in (0, 1]");
        const double inv = 1.0 / eps;
        const double snapped = std::round(inv);
        if (std::abs(inv - snapped) > 1e-9 * snapped)
            throw ValidationError(std::string(item) + ": 1/eps must be an integer");
        cfg.inv_eps.push_back(static_cast<int>(snapped));
    }

    cfg.macro_m = static_cast<int>(r.integer("macro.M", cfg.macro_m));
    if (cfg.macro_m < 1) throw ValidationError("macro.M: must be at least 1");
    for (int k : cfg.inv_eps)
        if (k % cfg.macro_m != 0)
            throw ValidationError("macro.M: must divide 1/eps for every study entry");

    const std::string ic = r.text("flags.ic_scaling", "natural");
    if (ic == "natural")
        cfg.ic_scaling = IcScaling::natural;
    else if (ic == "paper")
        cfg.ic_scaling = IcScaling::paper;
    else
        throw ValidationError("flags.ic_scaling: must be \"natural\" or \"paper\"");

    const std::string diff = r.text("flags.diffusion_scaling", "derived");
    if (diff == "derived")
        cfg.diffusion_scaling = DiffusionScaling::derived;
    else if (diff == "paper")
        cfg.diffusion_scaling = DiffusionScaling::paper;
    else
        throw ValidationError("flags.diffusion_scaling: must be \"derived\" or \"paper\"");

    const std::string iface = r.text("flags.interface_reconstruction", "cell");
    if (iface == "cell")
        cfg.interface_scheme = InterfaceScheme::cell;
    else if (iface == "halfcell")
        cfg.interface_scheme = InterfaceScheme::halfcell;
    else
        throw ValidationError("flags.interface_reconstruction: must be \"cell\" or \"halfcell\"");

    cfg.out_dir = r.text("output.out_dir", cfg.out_dir);
    const std::vector<std::string> formats =
        r.texts("output.formats", std::vector<std::string>{"csv", "json", "svg"});
    cfg.write_csv = cfg.write_json = cfg.write_svg = false;
    for (const std::string& fmt : formats) {
        if (fmt == "csv")
            cfg.write_csv = true;
        else if (fmt == "json")
            cfg.write_json = true;
        else if (fmt == "svg")
            cfg.write_svg = true;
        else
            throw ValidationError("output.formats: unknown format '" + fmt + "'");
    }

    r.reject_unknown();
    return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& text, std::span<const std::string> overrides) {
    Reader reader;
    reader.map = parse_kv_text(text);
    for (const std::string& item : overrides) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw ValidationError("override '" + item + "': expected key=value");
        const std::string key = trim(item.substr(0, eq));
        if (!valid_key(key)) throw ValidationError("override '" + item + "': malformed key");
        reader.map[key] = parse_value(item.substr(eq + 1), key);
    }
    return build_config(reader);
}

RunConfig load_config(const std::string& path, std::span<const std::string> overrides) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config file '" + path + "': cannot open");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), overrides);
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(std::span<const double> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(values[i]);
    }
    out += "]";
    return out;
}

void write_profile(std::ostringstream& out, const std::string& key, const ProfileSpec& spec) {
    out << key << ".kind = \"" << spec.kind << "\"\n";
    if (spec.kind == "constant") out << key << ".value = " << fmt_double(spec.value) << "\n";
    if (spec.kind == "gaussian") {
        out << key << ".amplitude = " << fmt_double(spec.amplitude) << "\n";
        out << key << ".center = " << fmt_list(spec.center) << "\n";
        out << key << ".width = " << fmt_double(spec.width) << "\n";
    }
    if (spec.kind == "sine-product")
        out << key << ".amplitude = " << fmt_double(spec.amplitude) << "\n";
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "cell.dim = " << cfg.dim << "\n";
    out << "cell.n = " << cfg.n << "\n";
    if (cfg.inclusions.empty()) {
        out << "cell.inclusion.none = true\n";
    } else {
        out << "cell.inclusion.center = " << fmt_list(cfg.inclusions.front().center) << "\n";
        out << "cell.inclusion.halfwidth = " << fmt_list(cfg.inclusions.front().halfwidth)
            << "\n";
    }
    if (cfg.physics_raw) {
        out << "physics.rho = " << fmt_double(cfg.raw.rho) << "\n";
        out << "physics.c = " << fmt_double(cfg.raw.c) << "\n";
        out << "physics.kappa = " << fmt_double(cfg.raw.kappa) << "\n";
        out << "physics.rho_b = " << fmt_double(cfg.raw.rho_b) << "\n";
        out << "physics.c_b = " << fmt_double(cfg.raw.c_b) << "\n";
        out << "physics.kappa_b = " << fmt_double(cfg.raw.kappa_b) << "\n";
        out << "physics.omega_b = " << fmt_double(cfg.raw.omega_b) << "\n";
        out << "physics.alpha_b_uses = \""
            << (cfg.alpha_b_uses == AlphaBloodSource::kappa_b ? "kappa_b" : "kappa") << "\"\n";
    } else {
        out << "physics.alpha = " << fmt_double(cfg.physics.alpha) << "\n";
        out << "physics.alpha_b = " << fmt_double(cfg.physics.alpha_b) << "\n";
        out << "physics.gamma = " << fmt_double(cfg.physics.gamma) << "\n";
    }
    write_profile(out, "data.f", cfg.f);
    write_profile(out, "data.f_b", cfg.f_b);
    write_profile(out, "data.h", cfg.h);
    write_profile(out, "data.h_b", cfg.h_b);
    out << "time.t_final = " << fmt_double(cfg.t_final) << "\n";
    out << "time.steps = " << cfg.steps << "\n";
    out << "study.epsilon_list = [";
    for (std::size_t i = 0; i < cfg.inv_eps.size(); ++i) {
        if (i) out << ", ";
        out << fmt_double(1.0 / cfg.inv_eps[i]);
    }
    out << "]\n";
    out << "macro.M = " << cfg.macro_m << "\n";
    out << "flags.ic_scaling = \""
        << (cfg.ic_scaling == IcScaling::natural ? "natural" : "paper") << "\"\n";
    out << "flags.diffusion_scaling = \""
        << (cfg.diffusion_scaling == DiffusionScaling::derived ? "derived" : "paper") << "\"\n";
    out << "flags.interface_reconstruction = \""
        << (cfg.interface_scheme == InterfaceScheme::cell ? "cell" : "halfcell") << "\"\n";
    out << "output.out_dir = \"" << cfg.out_dir << "\"\n";
    out << "output.formats = [";
    bool first = true;
    for (const char* fmt : {"csv", "json", "svg"}) {
        const bool enabled = (fmt[0] == 'c' && cfg.write_csv) || (fmt[0] == 'j' && cfg.write_json) ||
                             (fmt[0] == 's' && cfg.write_svg);
        if (!enabled) continue;
        if (!first) out << ", ";
        out << "\"" << fmt << "\"";
        first = false;
    }
    out << "]\n";
    return out.str();
}

}  // namespace bioheat
