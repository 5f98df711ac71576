#include "bgw/jsonio.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "bgw/errors.hpp"
#include "json.hpp"

namespace bgw {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ConfigError(std::string(what) + ": malformed JSON");
    return j;
}

Rat rat_value(const json& v, const char* where) {
    if (v.is_string()) return parse_rat(v.get<std::string>());
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
    if (v.is_number_float()) {
        // exact image of the double; decimal inputs should use strings
        Rat r(v.get<double>());
        r.canonicalize();
        return r;
    }
    throw ConfigError(std::string(where) + ": expected a rational string or number");
}

int int_value(const json& v, const char* where) {
    if (!v.is_number_integer()) throw ConfigError(std::string(where) + ": expected an integer");
    const long long x = v.get<long long>();
    if (x < 0) throw ConfigError(std::string(where) + ": expected a nonnegative integer");
    return static_cast<int>(x);
}

}  // namespace

PmfQ pmf_from_json(const std::string& text) {
    const json j = parse_json(text, "pmf");
    if (!j.is_object()) throw ConfigError("pmf: expected a JSON object");

    std::map<int, Rat> table;
    if (auto it = j.find("table"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("pmf: \"table\" must map degrees to values");
        for (const auto& [key, val] : it->items()) {
            int k = 0;
            try {
                std::size_t used = 0;
                k = std::stoi(key, &used);
                if (used != key.size() || k < 0) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ConfigError("pmf: bad degree key '" + key + "'");
            }
            table[k] = rat_value(val, "pmf table");
        }
    }

    std::vector<GeomTail<Rat>> tails;
    const auto add_tail = [&](const json& t) {
        if (!t.is_object()) throw ConfigError("pmf: tail entries must be objects");
        GeomTail<Rat> g;
        g.start = int_value(t.at("start"), "pmf tail start");
        g.step = t.contains("step") ? int_value(t.at("step"), "pmf tail step") : 1;
        g.coeff = rat_value(t.at("coeff"), "pmf tail coeff");
        g.ratio = rat_value(t.at("ratio"), "pmf tail ratio");
        tails.push_back(std::move(g));
    };
    if (auto it = j.find("tail"); it != j.end()) add_tail(*it);
    if (auto it = j.find("tails"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("pmf: \"tails\" must be an array");
        for (const auto& t : *it) add_tail(t);
    }

    try {
        return PmfQ(std::move(table), std::move(tails));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("pmf: ") + e.what());
    }
}

std::string pmf_to_json(const PmfQ& p) {
    json j = json::object();
    json table = json::object();
    for (const auto& [k, v] : p.table()) table[std::to_string(k)] = rat_to_string(v);
    j["table"] = std::move(table);
    if (p.has_tail()) {
        json tails = json::array();
        for (const auto& t : p.tails()) {
            tails.push_back({{"start", t.start},
                             {"step", t.step},
                             {"coeff", rat_to_string(t.coeff)},
                             {"ratio", rat_to_string(t.ratio)}});
        }
        j["tails"] = std::move(tails);
    }
    return j.dump();
}

SetFamily family_from_json(const std::string& text) {
    const json j = parse_json(text, "family");
    if (!j.is_object()) throw ConfigError("family: expected a JSON object");
    const auto sets_it = j.find("sets");
    if (sets_it == j.end() || !sets_it->is_array())
        throw ConfigError("family: expected a \"sets\" array");

    std::vector<IntSet> sets;
    for (const auto& entry : *sets_it) {
        if (!entry.is_array()) throw ConfigError("family: each class is an array of degrees");
        std::vector<int> xs;
        for (const auto& v : entry) xs.push_back(int_value(v, "family class"));
        sets.push_back(IntSet::finite(std::move(xs)));
    }

    if (auto it = j.find("tails"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("family: \"tails\" must be an array");
        for (const auto& t : *it) {
            if (!t.is_object()) throw ConfigError("family: tail entries must be objects");
            const int idx = int_value(t.at("set"), "family tail set");
            if (idx < 1 || idx > static_cast<int>(sets.size()))
                throw ConfigError("family: tail refers to class " + std::to_string(idx) +
                                  " of " + std::to_string(sets.size()));
            const int start = int_value(t.at("start"), "family tail start");
            const int step = t.contains("step") ? int_value(t.at("step"), "family tail step") : 1;
            if (step < 1) throw ConfigError("family: tail step must be at least 1");
            auto& s = sets[static_cast<std::size_t>(idx - 1)];
            s = s.unite(IntSet::progression(start, step));
        }
    }

    for (const auto& s : sets)
        if (s.is_empty()) throw ConfigError("family: classes must be nonempty");
    return SetFamily{std::move(sets)};
}

std::string family_to_json(const SetFamily& f) {
    json j = json::object();
    json sets = json::array();
    json tails = json::array();
    int label = 0;
    for (const auto& s : f.sets) {
        ++label;
        json finite = json::array();
        if (s.is_finite()) {
            if (const auto mx = s.max_element())
                for (int x : s.elements_up_to(*mx)) finite.push_back(x);
        } else {
            // head explicitly, one progression entry per periodic residue
            for (int x : s.elements_up_to(s.head_len() - 1)) finite.push_back(x);
            for (int r = 0; r < s.period(); ++r) {
                const int rep = s.head_len() + r;
                if (s.contains(rep))
                    tails.push_back({{"set", label}, {"start", rep}, {"step", s.period()}});
            }
        }
        sets.push_back(std::move(finite));
    }
    j["sets"] = std::move(sets);
    if (!tails.empty()) j["tails"] = std::move(tails);
    return j.dump();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

PmfQ load_pmf(const std::string& path) {
    try {
        return pmf_from_json(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

SetFamily load_family(const std::string& path) {
    try {
        return family_from_json(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace bgw
