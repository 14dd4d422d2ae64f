#include "hybridsim/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "hybridsim/errors.hpp"
#include "hybridsim/units.hpp"

namespace hybridsim::cli {

namespace {

constexpr std::string_view kConfigPrefix = "# config: ";

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = boost::algorithm::trim_copy(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
    }
    return v;
}

void flatten(const boost::property_tree::ptree& tree, const std::string& prefix,
             std::map<std::string, std::string>& out)
{
    for (const auto& [name, child] : tree) {
        const std::string key = prefix.empty() ? name : prefix + "." + name;
        if (child.empty()) {
            out[key] = boost::algorithm::trim_copy(child.data());
        } else {
            flatten(child, key, out);
        }
    }
}

} // namespace

Config Config::parse_ini(const std::string& text)
{
    std::istringstream in(text);
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
    }
    Config c;
    flatten(tree, "", c.values_);
    return c;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    if (!text.starts_with("# hybridsim")) {
        try {
            return parse_ini(text);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
        }
    }

    // A CSV written by this tool: the metadata block carries the full config.
    Config c;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line) && line.starts_with("#")) {
        if (!line.starts_with(kConfigPrefix)) continue;
        c.set(line.substr(kConfigPrefix.size()));
    }
    if (c.values_.empty()) throw ConfigError(fmt::format("{}: no embedded config lines", path.string()));
    return c;
}

void Config::set(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("expected key=value, got '{}'", assignment));
    set(boost::algorithm::trim_copy(assignment.substr(0, eq)),
        boost::algorithm::trim_copy(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value)
{
    if (key.empty() || key.find('.') == std::string::npos) {
        throw ConfigError(fmt::format("key '{}' must look like section.name", key));
    }
    values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.contains(key); }

std::string Config::get_string(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(fmt::format("missing required key '{}'", key));
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const { return to_double(key, get_string(key)); }

double Config::get_double(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const
{
    const std::string t = boost::algorithm::trim_copy(get_string(key));
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, t));
    }
    return v;
}

long long Config::get_int(const std::string& key, long long fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

std::vector<double> Config::get_list(const std::string& key) const
{
    std::vector<std::string> parts;
    const std::string text = get_string(key);
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(to_double(key, p));
    return out;
}

std::vector<std::string> Config::canonical_lines() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k + " = " + v);
    return out;
}

std::string Config::digest() const
{
    const std::string text = boost::algorithm::join(canonical_lines(), "\n");
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::vector<double> SweepAxis::values() const
{
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        // Endpoints are hit exactly so that rows are reproducible from the config.
        v[i] = i == points - 1 ? stop : start + (stop - start) * i / (points - 1);
    }
    return v;
}

SweepAxis sweep_axis(const Config& c, const std::string& prefix)
{
    SweepAxis a;
    a.quantity = c.get_string(prefix + ".quantity");
    a.start = c.get_double(prefix + ".start");
    a.stop = c.get_double(prefix + ".stop");
    a.points = static_cast<int>(c.get_int(prefix + ".points"));
    if (a.quantity != "b0" && a.quantity != "omega_m" && a.quantity != "omega_a" && a.quantity != "omega_minus") {
        throw ConfigError(fmt::format("{}.quantity: unknown axis '{}'", prefix, a.quantity));
    }
    if (a.points < 2) throw ConfigError(fmt::format("{}.points must be >= 2", prefix));
    if (!(a.start < a.stop)) throw ConfigError(fmt::format("{}.start must be below {}.stop", prefix, prefix));
    return a;
}

HybridParams<double> system_params(const Config& c)
{
    HybridParams<double> p;
    p.omega_c = hz_to_angular(c.get_double("system.omega_c_hz"));
    p.omega_m = hz_to_angular(c.get_double("system.omega_m_hz", c.get_double("system.omega_c_hz")));
    p.gamma_c = hz_to_angular(c.get_double("system.gamma_c_hz"));
    p.gamma_m = hz_to_angular(c.get_double("system.gamma_m_hz"));
    p.g_cm = hz_to_angular(c.get_double("system.g_cm_hz"));
    try {
        validate(p);
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("system: {}", e.what()));
    }
    return p;
}

ModeSystem<double> mode_system(const Config& c)
{
    const long long n = c.get_int("system.n_spheres", 1);
    if (n < 1) throw ConfigError("system.n_spheres must be >= 1");
    return ModeSystem<double>::identical(system_params(c), static_cast<std::size_t>(n));
}

AxionDrive<double> axion_drive(const Config& c)
{
    AxionDrive<double> d;
    d.g_am = hz_to_angular(c.get_double("drive.g_am_hz"));
    d.n_a = c.get_double("drive.n_a");
    if (d.n_a < 0 || d.g_am < 0) throw ConfigError("drive: g_am_hz and n_a must be non-negative");
    return d;
}

std::uint64_t seed(const Config& c)
{
    const long long s = c.get_int("run.seed", 0);
    if (s < 0) throw ConfigError("run.seed must be non-negative");
    return static_cast<std::uint64_t>(s);
}

double omega_m_for(const SweepAxis& axis, double value)
{
    if (axis.quantity == "b0") {
        if (value < 0) throw ConfigError("sweep: negative field");
        return larmor_frequency(value);
    }
    if (axis.quantity == "omega_m") return hz_to_angular(value);
    throw ConfigError(fmt::format("sweep.quantity '{}' does not tune the magnon", axis.quantity));
}

} // namespace hybridsim::cli
