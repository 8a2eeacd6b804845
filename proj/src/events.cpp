#include "confsweep/events.hpp"

#include "json.hpp"

namespace confsweep {

namespace {

nlohmann::ordered_json event_to_json(const Event& e) {
    nlohmann::ordered_json j;
    switch (e.kind) {
        case Event::Kind::Init:
            j["t"] = "init";
            j["lambda"] = e.lambda;
            break;
        case Event::Kind::Work:
            j["t"] = "work";
            j["chosen"] = e.chosen;
            j["left"] = e.left;
            j["right"] = e.right;
            break;
        case Event::Kind::Frame:
            j["t"] = "frame";
            j["groups"] = e.groups;
            j["gaps"] = e.gaps;
            break;
        case Event::Kind::Close:
            j["t"] = "close";
            j["u"] = e.closure_counts;
            break;
    }
    return j;
}

Event event_from_json(const nlohmann::json& j) {
    Event e;
    std::string t = j.at("t").get<std::string>();
    if (t == "init") {
        e.kind = Event::Kind::Init;
        e.lambda = j.at("lambda").get<std::vector<int>>();
    } else if (t == "work") {
        e.kind = Event::Kind::Work;
        e.chosen = j.at("chosen").get<std::vector<int>>();
        e.left = j.at("left").get<std::vector<int>>();
        e.right = j.at("right").get<std::vector<int>>();
    } else if (t == "frame") {
        e.kind = Event::Kind::Frame;
        e.groups = j.at("groups").get<std::vector<std::vector<int>>>();
        e.gaps = j.at("gaps").get<std::vector<std::vector<int>>>();
    } else if (t == "close") {
        e.kind = Event::Kind::Close;
        e.closure_counts = j.at("u").get<std::vector<int>>();
    } else {
        throw std::invalid_argument("unknown event kind '" + t + "'");
    }
    return e;
}

}  // namespace

std::string events_to_json(const std::vector<Event>& history) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : history) arr.push_back(event_to_json(e));
    return arr.dump();
}

std::vector<Event> events_from_json(const std::string& json_array) {
    nlohmann::json arr = nlohmann::json::parse(json_array);
    std::vector<Event> out;
    for (const auto& j : arr) out.push_back(event_from_json(j));
    return out;
}

std::string serialize_raw(const RawRecord& rec) {
    std::string base = serialize(rec.config);
    // Splice the history field before the closing brace of the canonical record.
    std::string hist = events_to_json(rec.history);
    base.pop_back();
    base += ",\"history\":" + hist + "}";
    return base;
}

std::optional<RawRecord> parse_raw(const std::string& line, std::string* err) {
    try {
        nlohmann::json j = nlohmann::json::parse(line);
        int n = j.at("n").get<int>();
        int k = j.at("k").get<int>();
        auto lines = j.at("lines").get<std::vector<std::vector<int>>>();
        RawRecord rec{Configuration(n, k, std::move(lines)), {}};
        if (j.contains("history"))
            for (const auto& ej : j["history"]) rec.history.push_back(event_from_json(ej));
        return rec;
    } catch (const std::exception& e) {
        if (err) *err = e.what();
        return std::nullopt;
    }
}

}  // namespace confsweep
