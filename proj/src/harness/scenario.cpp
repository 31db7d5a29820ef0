#include "tsclab/harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tsclab/devices/sm.hpp"

namespace tsclab::harness {

using nlohmann::json;

namespace {

// Typed access to a JSON object that reports the offending field path.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }
    const json& raw(const std::string& key) const { return j_.at(key); }

    void allow(std::initializer_list<const char*> keys) const {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items())
            if (!ok.count(k)) throw ScenarioError(at(k), "unknown field");
    }

    double number(const std::string& key, std::optional<double> def = std::nullopt) const {
        if (!has(key)) {
            if (def) return *def;
            throw ScenarioError(at(key), "required field missing");
        }
        const json& v = j_.at(key);
        if (!v.is_number()) throw ScenarioError(at(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ScenarioError(at(key), "must be finite");
        return d;
    }
    int integer(const std::string& key, std::optional<int> def = std::nullopt) const {
        if (!has(key)) {
            if (def) return *def;
            throw ScenarioError(at(key), "required field missing");
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ScenarioError(at(key), "expected an integer");
        return v.get<int>();
    }
    std::string text(const std::string& key, std::optional<std::string> def = std::nullopt) const {
        if (!has(key)) {
            if (def) return *def;
            throw ScenarioError(at(key), "required field missing");
        }
        const json& v = j_.at(key);
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (!v.is_string()) throw ScenarioError(at(key), "expected a string");
        return v.get<std::string>();
    }
    bool boolean(const std::string& key, bool def) const {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ScenarioError(at(key), "expected true or false");
        return v.get<bool>();
    }
    const json& array(const std::string& key) const {
        const json& v = j_.at(key);
        if (!v.is_array()) throw ScenarioError(at(key), "expected an array");
        return v;
    }

private:
    const json& j_;
    std::string path_;
};

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

network::BusType bus_type(const std::string& s, const std::string& where) {
    if (s == "slack") return network::BusType::Slack;
    if (s == "pv") return network::BusType::PV;
    if (s == "pq") return network::BusType::PQ;
    throw ScenarioError(where, "bus type must be slack, pv or pq");
}

std::string bus_type_name(network::BusType t) {
    switch (t) {
    case network::BusType::Slack: return "slack";
    case network::BusType::PV: return "pv";
    case network::BusType::PQ: return "pq";
    }
    return "pq";
}

network::Network parse_network(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "wscc9") return network::wscc9();
        throw ScenarioError(path, "unknown network preset '" + j.get<std::string>() + "'");
    }
    Fields f(j, path);
    f.allow({"preset", "buses", "branches", "loads"});
    network::Network net;
    if (f.has("preset")) {
        if (f.text("preset") != "wscc9") throw ScenarioError(f.at("preset"), "unknown network preset");
        net = network::wscc9();
    }
    if (f.has("buses")) {
        net.buses.clear();
        const json& a = f.array("buses");
        for (std::size_t i = 0; i < a.size(); ++i) {
            Fields b(a[i], index_path(f.at("buses"), i));
            b.allow({"id", "type", "v", "angle", "p", "q"});
            net.buses.push_back({b.text("id"), bus_type(b.text("type", "pq"), b.at("type")), b.number("v", 1.0),
                                 b.number("angle", 0.0), b.number("p", 0.0), b.number("q", 0.0)});
        }
    }
    if (f.has("branches")) {
        net.branches.clear();
        const json& a = f.array("branches");
        for (std::size_t i = 0; i < a.size(); ++i) {
            Fields b(a[i], index_path(f.at("branches"), i));
            b.allow({"from", "to", "r", "x", "b", "tap"});
            net.branches.push_back({b.text("from"), b.text("to"), b.number("r", 0.0), b.number("x"),
                                    b.number("b", 0.0), b.number("tap", 1.0)});
        }
    }
    if (f.has("loads")) {
        net.loads.clear();
        const json& a = f.array("loads");
        for (std::size_t i = 0; i < a.size(); ++i) {
            Fields l(a[i], index_path(f.at("loads"), i));
            l.allow({"bus", "kind", "p", "q"});
            const std::string kind = l.text("kind", "constant_power");
            network::LoadKind k;
            if (kind == "constant_power") k = network::LoadKind::ConstantPower;
            else if (kind == "constant_impedance") k = network::LoadKind::ConstantImpedance;
            else throw ScenarioError(l.at("kind"), "must be constant_power or constant_impedance");
            net.loads.push_back({l.text("bus"), k, l.number("p", 0.0), l.number("q", 0.0)});
        }
    }
    return net;
}

json network_to_json(const network::Network& net) {
    const network::Network ref = network::wscc9();
    const auto same = [&] {
        if (net.buses.size() != ref.buses.size() || net.branches.size() != ref.branches.size() ||
            net.loads.size() != ref.loads.size())
            return false;
        for (std::size_t i = 0; i < net.buses.size(); ++i) {
            const auto &a = net.buses[i], &b = ref.buses[i];
            if (a.id != b.id || a.type != b.type || a.v_set != b.v_set || a.angle_set != b.angle_set ||
                a.p_gen != b.p_gen || a.q_gen != b.q_gen)
                return false;
        }
        for (std::size_t i = 0; i < net.branches.size(); ++i) {
            const auto &a = net.branches[i], &b = ref.branches[i];
            if (a.from != b.from || a.to != b.to || a.r != b.r || a.x != b.x || a.b != b.b || a.tap != b.tap)
                return false;
        }
        for (std::size_t i = 0; i < net.loads.size(); ++i) {
            const auto &a = net.loads[i], &b = ref.loads[i];
            if (a.bus != b.bus || a.kind != b.kind || a.p != b.p || a.q != b.q) return false;
        }
        return true;
    };
    if (same()) return "wscc9";
    json j;
    j["buses"] = json::array();
    for (const auto& b : net.buses)
        j["buses"].push_back(
            {{"id", b.id}, {"type", bus_type_name(b.type)}, {"v", b.v_set}, {"angle", b.angle_set}, {"p", b.p_gen}, {"q", b.q_gen}});
    j["branches"] = json::array();
    for (const auto& b : net.branches)
        j["branches"].push_back({{"from", b.from}, {"to", b.to}, {"r", b.r}, {"x", b.x}, {"b", b.b}, {"tap", b.tap}});
    j["loads"] = json::array();
    for (const auto& l : net.loads)
        j["loads"].push_back({{"bus", l.bus},
                              {"kind", l.kind == network::LoadKind::ConstantPower ? "constant_power" : "constant_impedance"},
                              {"p", l.p},
                              {"q", l.q}});
    return j;
}

std::string action_name(network::EventAction a) {
    return a == network::EventAction::ScaleLoadTotal ? "load_step" : "set_parameter";
}

int default_case_for_model(const std::string& model) {
    if (model == "gfl") return 1;
    if (model == "gfm") return 4;
    if (model == "vsm") return 6;
    return 0;
}

devices::IbrConfig placement_config(const DevicePlacement& d) {
    const int c = d.study_case != 0 ? d.study_case : default_case_for_model(d.model);
    devices::IbrConfig cfg = devices::IbrConfig::for_case(c);
    if (d.slack_sign) cfg.slack_sign = *d.slack_sign;
    if (d.literal_power_reference) cfg.literal_power_reference = *d.literal_power_reference;
    return cfg;
}

bool is_converter(const std::string& model) { return model == "gfl" || model == "gfm" || model == "vsm"; }

void expect_model_matches_case(const DevicePlacement& d, const std::string& where) {
    if (!is_converter(d.model) || d.study_case == 0) return;
    const auto scheme = devices::IbrConfig::for_case(d.study_case).scheme;
    const char* want = scheme == devices::ControlScheme::GridFollowing ? "gfl"
                       : scheme == devices::ControlScheme::GridForming  ? "gfm"
                                                                        : "vsm";
    if (d.model != want)
        throw ScenarioError(where, "case " + std::to_string(d.study_case) + " uses model '" + want + "', not '" +
                                       d.model + "'");
}

}  // namespace

Scenario case_scenario(int study_case) {
    if (study_case < 1 || study_case > 6)
        throw ScenarioError("case", "unknown case id " + std::to_string(study_case) + " (expected 1..6)");
    Scenario s;
    s.name = "case" + std::to_string(study_case);
    s.study_case = study_case;
    s.network = network::wscc9();
    static const char* kModels[] = {"gfl", "gfl", "gfl", "gfm", "gfm", "vsm"};
    for (int k = 0; k < 3; ++k) {
        DevicePlacement d;
        d.name = "IBR" + std::to_string(k + 1);
        d.bus = std::to_string(k + 1);
        d.model = kModels[study_case - 1];
        d.study_case = study_case;
        d.params["s_base_mva"] = kIbrRatingMva[k];
        s.devices.push_back(d);
    }
    const double step = study_case == 6 ? 0.10 : 0.05;
    s.events.push_back({1.0, network::EventAction::ScaleLoadTotal, step, "5"});
    s.description = "Case " + std::to_string(study_case) + ": " + std::to_string(static_cast<int>(step * 100)) +
                    "% load step at bus 5, t = 1 s";
    return s;
}

std::string sweep_parameter_name(const std::string& alias) {
    if (alias == "Cdc" || alias == "c_dc") return "c_dc";
    if (alias == "Tslack" || alias == "t_slack") return "t_slack";
    if (alias == "imax" || alias == "i_max") return "i_max";
    if (alias == "M" || alias == "m_vsm") return "m_vsm";
    throw ScenarioError("sweep.param", "unknown sweep parameter '" + alias + "' (expected Cdc, Tslack, imax or M)");
}

void apply_override(Scenario& s, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ScenarioError("--override", "expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(assignment.substr(eq + 1), &used);
        if (used != assignment.size() - eq - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
        throw ScenarioError("--override", "value of '" + key + "' is not a number");
    }
    if (key == "t_end") return void(s.simulation.t_end = value);
    if (key == "step") return void(s.simulation.step = value);
    if (key == "event_window") return void(s.simulation.event_window = value);
    if (key == "event_refinement") return void(s.simulation.event_refinement = static_cast<int>(value));
    if (key == "window") return void(s.classification.window = s.condition3.window = value);
    if (key.rfind("event", 0) == 0) {
        const auto dot = key.find('.');
        const std::size_t idx = std::stoul(key.substr(5, dot - 5));
        if (idx >= s.events.size() || dot == std::string::npos)
            throw ScenarioError("--override", "no event '" + key.substr(0, dot) + "'");
        const std::string field = key.substr(dot + 1);
        if (field == "magnitude") s.events[idx].magnitude = value;
        else if (field == "time") s.events[idx].time = value;
        else throw ScenarioError("--override", "event field must be magnitude or time");
        return;
    }
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw ScenarioError("--override", "unknown setting '" + key + "'");
    const std::string dev = key.substr(0, dot), param = key.substr(dot + 1);
    const std::string name = param == "Cdc" || param == "Tslack" || param == "imax" || param == "M"
                                 ? sweep_parameter_name(param)
                                 : param;
    bool hit = false;
    for (auto& d : s.devices)
        if (dev == "*" || d.name == dev) {
            if (dev == "*" && !is_converter(d.model) && devices::IbrParams{}.get(name)) continue;
            d.params[name] = value;
            hit = true;
        }
    if (!hit) throw ScenarioError("--override", "no device named '" + dev + "'");
}

Scenario parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos > 0 ? pos - 1 : 0), '\n'));
        throw ScenarioError("line " + std::to_string(line), std::string("JSON syntax error: ") + e.what());
    }
    Fields f(root, "");
    f.allow({"name", "description", "case", "network", "devices", "events", "simulation", "channels",
             "classification", "condition3", "sweep", "overrides"});

    Scenario s;
    if (f.has("case")) {
        const int c = f.integer("case");
        if (c < 1 || c > 6) throw ScenarioError("case", "unknown case id " + std::to_string(c) + " (expected 1..6)");
        s = case_scenario(c);
    }
    s.name = f.text("name", s.name.empty() ? std::string("scenario") : s.name);
    s.description = f.text("description", s.description);
    if (f.has("network")) s.network = parse_network(f.raw("network"), "network");
    else if (!f.has("case")) throw ScenarioError("network", "required field missing");

    if (f.has("devices")) {
        s.devices.clear();
        const json& a = f.array("devices");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string where = index_path("devices", i);
            Fields d(a[i], where);
            d.allow({"name", "bus", "model", "case", "slack_sign", "literal_power_reference", "params", "dispatch"});
            DevicePlacement p;
            p.name = d.text("name");
            p.bus = d.text("bus");
            p.model = d.text("model");
            if (!is_converter(p.model) && p.model != "sm2" && p.model != "infinite")
                throw ScenarioError(d.at("model"), "unknown model '" + p.model + "' (gfl, gfm, vsm, sm2, infinite)");
            p.study_case = d.integer("case", 0);
            if (p.study_case != 0 && (p.study_case < 1 || p.study_case > 6))
                throw ScenarioError(d.at("case"), "unknown case id " + std::to_string(p.study_case));
            expect_model_matches_case(p, d.at("case"));
            if (d.has("slack_sign")) p.slack_sign = d.number("slack_sign");
            if (d.has("literal_power_reference")) p.literal_power_reference = d.boolean("literal_power_reference", false);
            if (d.has("params")) {
                const json& params = d.raw("params");
                if (!params.is_object()) throw ScenarioError(d.at("params"), "expected an object");
                for (const auto& [k, v] : params.items()) {
                    const std::string pw = d.at("params") + "." + k;
                    if (!v.is_number()) throw ScenarioError(pw, "expected a number");
                    p.params[k] = v.get<double>();
                }
            }
            if (d.has("dispatch")) {
                const json& dp = d.raw("dispatch");
                if (!dp.is_array() || dp.size() != 2 || !dp[0].is_number() || !dp[1].is_number())
                    throw ScenarioError(d.at("dispatch"), "expected [p, q]");
                p.dispatch = numerics::Complex{dp[0].get<double>(), dp[1].get<double>()};
            }
            s.devices.push_back(p);
        }
    }

    if (f.has("events")) {
        s.events.clear();
        const json& a = f.array("events");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string where = index_path("events", i);
            Fields e(a[i], where);
            e.allow({"time", "action", "magnitude", "target"});
            network::Event ev;
            ev.time = e.number("time");
            if (ev.time < 0.0) throw ScenarioError(e.at("time"), "event time must be >= 0");
            const std::string action = e.text("action");
            if (action == "load_step") ev.action = network::EventAction::ScaleLoadTotal;
            else if (action == "set_parameter") ev.action = network::EventAction::SetParameter;
            else throw ScenarioError(e.at("action"), "must be load_step or set_parameter");
            ev.magnitude = e.number("magnitude");
            ev.target = e.text("target", "*");
            try {
                network::validate_event(ev);
            } catch (const network::NetworkError& err) {
                throw ScenarioError(where, err.what());
            }
            s.events.push_back(ev);
        }
    }

    if (f.has("simulation")) {
        Fields sim(f.raw("simulation"), "simulation");
        sim.allow({"t_end", "step", "newton_tol", "max_iter", "max_halvings", "audit", "event_window", "event_refinement"});
        s.simulation.t_end = sim.number("t_end", s.simulation.t_end);
        s.simulation.step = sim.number("step", s.simulation.step);
        s.simulation.newton.newton_tol = sim.number("newton_tol", s.simulation.newton.newton_tol);
        s.simulation.newton.max_iter = sim.integer("max_iter", s.simulation.newton.max_iter);
        s.simulation.max_halvings = sim.integer("max_halvings", s.simulation.max_halvings);
        s.simulation.audit = sim.boolean("audit", s.simulation.audit);
        s.simulation.event_window = sim.number("event_window", s.simulation.event_window);
        s.simulation.event_refinement = sim.integer("event_refinement", s.simulation.event_refinement);
    }
    if (f.has("channels")) {
        const json& a = f.array("channels");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_string()) throw ScenarioError(index_path("channels", i), "expected a string");
            s.channels.push_back(a[i].get<std::string>());
        }
    }
    if (f.has("classification")) {
        Fields c(f.raw("classification"), "classification");
        c.allow({"window", "settle_tol"});
        s.classification.window = c.number("window", s.classification.window);
        s.classification.settle_tol = c.number("settle_tol", s.classification.settle_tol);
    }
    if (f.has("condition3")) {
        Fields c(f.raw("condition3"), "condition3");
        c.allow({"window", "tol_h", "tol_omega", "tol_rho"});
        s.condition3.window = c.number("window", s.condition3.window);
        s.condition3.tol_h = c.number("tol_h", s.condition3.tol_h);
        s.condition3.tol_omega = c.number("tol_omega", s.condition3.tol_omega);
        s.condition3.tol_rho = c.number("tol_rho", s.condition3.tol_rho);
    }
    if (f.has("sweep")) {
        Fields sw(f.raw("sweep"), "sweep");
        sw.allow({"param", "values", "device"});
        SweepSettings st;
        st.param = sw.text("param");
        sweep_parameter_name(st.param);
        st.device = sw.text("device", "*");
        const json& a = sw.array("values");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number()) throw ScenarioError(index_path("sweep.values", i), "expected a number");
            st.values.push_back(a[i].get<double>());
        }
        s.sweep = st;
    }
    if (f.has("overrides")) {
        const json& a = f.array("overrides");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_string()) throw ScenarioError(index_path("overrides", i), "expected \"key=value\"");
            apply_override(s, a[i].get<std::string>());
        }
    }
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path, "cannot open scenario file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ": " + e.where(), std::string(e.what()).substr(e.where().empty() ? 0 : e.where().size() + 2));
    }
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    j["network"] = network_to_json(s.network);
    j["devices"] = json::array();
    for (const auto& d : s.devices) {
        json o{{"name", d.name}, {"bus", d.bus}, {"model", d.model}};
        if (d.study_case != 0) o["case"] = d.study_case;
        if (d.slack_sign) o["slack_sign"] = *d.slack_sign;
        if (d.literal_power_reference) o["literal_power_reference"] = *d.literal_power_reference;
        if (!d.params.empty()) {
            json p = json::object();
            for (const auto& [k, v] : d.params) p[k] = v;
            o["params"] = p;
        }
        if (d.dispatch) o["dispatch"] = {d.dispatch->real(), d.dispatch->imag()};
        j["devices"].push_back(o);
    }
    j["events"] = json::array();
    for (const auto& e : s.events)
        j["events"].push_back(
            {{"time", e.time}, {"action", action_name(e.action)}, {"magnitude", e.magnitude}, {"target", e.target}});
    j["simulation"] = {{"t_end", s.simulation.t_end},
                       {"step", s.simulation.step},
                       {"newton_tol", s.simulation.newton.newton_tol},
                       {"max_iter", s.simulation.newton.max_iter},
                       {"max_halvings", s.simulation.max_halvings},
                       {"event_window", s.simulation.event_window},
                       {"event_refinement", s.simulation.event_refinement}};
    if (!s.channels.empty()) j["channels"] = s.channels;
    j["classification"] = {{"window", s.classification.window}, {"settle_tol", s.classification.settle_tol}};
    j["condition3"] = {{"window", s.condition3.window},
                       {"tol_h", s.condition3.tol_h},
                       {"tol_omega", s.condition3.tol_omega},
                       {"tol_rho", s.condition3.tol_rho}};
    if (s.sweep) j["sweep"] = {{"param", s.sweep->param}, {"device", s.sweep->device}, {"values", s.sweep->values}};
    return j.dump(2) + "\n";
}

void validate_scenario(const Scenario& s) {
    if (!(s.simulation.t_end > 0.0)) throw ScenarioError("simulation.t_end", "must be > 0");
    if (!(s.simulation.step > 0.0)) throw ScenarioError("simulation.step", "must be > 0");
    if (s.devices.empty()) throw ScenarioError("devices", "at least one device is required");
    std::set<std::string> names;
    for (std::size_t i = 0; i < s.devices.size(); ++i) {
        const auto& d = s.devices[i];
        const std::string where = index_path("devices", i);
        if (!names.insert(d.name).second) throw ScenarioError(where + ".name", "duplicate device name '" + d.name + "'");
        if (!s.network.has_bus(d.bus)) throw ScenarioError(where + ".bus", "unknown bus '" + d.bus + "'");
        for (const auto& [k, v] : d.params) {
            const bool known = is_converter(d.model) ? devices::IbrParams{}.get(k).has_value()
                               : d.model == "sm2"    ? devices::SmParams{}.get(k).has_value()
                                                     : (k == "v_mag" || k == "v_angle");
            if (!known) throw ScenarioError(where + ".params." + k, "unknown parameter for model '" + d.model + "'");
        }
    }
    for (std::size_t i = 1; i < s.events.size(); ++i)
        if (s.events[i].time < s.events[i - 1].time)
            throw ScenarioError(index_path("events", i) + ".time", "events must be sorted by time");
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        if (e.action == network::EventAction::ScaleLoadTotal && e.target != "*" && !s.network.has_bus(e.target))
            throw ScenarioError(index_path("events", i) + ".target", "unknown bus '" + e.target + "'");
        if (e.action == network::EventAction::SetParameter &&
            !names.count(e.target.substr(0, e.target.find('.'))))
            throw ScenarioError(index_path("events", i) + ".target", "unknown device in '" + e.target + "'");
    }
}

system::PowerSystem build_system(const Scenario& s) {
    validate_scenario(s);
    system::PowerSystem sys(s.network);
    for (std::size_t i = 0; i < s.devices.size(); ++i) {
        const auto& d = s.devices[i];
        const std::string where = index_path("devices", i);
        try {
            if (is_converter(d.model)) {
                devices::IbrParams p;
                for (const auto& [k, v] : d.params) p.set(k, v);
                sys.add_device(std::make_unique<devices::IbrDevice>(d.name, d.bus, placement_config(d), p), d.dispatch);
            } else if (d.model == "sm2") {
                devices::SmParams p;
                for (const auto& [k, v] : d.params) p.set(k, v);
                sys.add_device(std::make_unique<devices::SynchronousMachine>(d.name, d.bus, p), d.dispatch);
            } else {
                auto src = std::make_unique<devices::InfiniteSource>(d.name, d.bus);
                for (const auto& [k, v] : d.params) src->set_parameter(k, v);
                sys.add_device(std::move(src), d.dispatch);
            }
        } catch (const ScenarioError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(where, e.what());
        }
    }
    return sys;
}

}  // namespace tsclab::harness
