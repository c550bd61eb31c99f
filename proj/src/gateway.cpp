#include "aide/gateway.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <random>
#include <thread>

#include <httplib.h>

#include "aide/json_fields.hpp"

namespace aide {

using nlohmann::json;
namespace fs = std::filesystem;

json ApiError::to_json() const { return json{{"code", code}, {"message", message}, {"detail", detail}}; }

ApiError to_api_error(const Error& error) {
    int status = 500;
    switch (error.code()) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::ParseError:
        case ErrorCode::ScenarioInvalid:
        case ErrorCode::UnknownLabel:
        case ErrorCode::UnknownRobotGoal:
            status = 400;
            break;
        case ErrorCode::UnknownMedication:
        case ErrorCode::EventWithoutBaseDose:
        case ErrorCode::RemoveFromEmptyCell:
        case ErrorCode::InconsistentScenario:
        case ErrorCode::CatalogGap:
        case ErrorCode::UnresolvedPlaceholder:
        case ErrorCode::InfeasibleObservation:
            status = 422;
            break;
        case ErrorCode::UnknownSession:
        case ErrorCode::SessionClosed:
            status = 404;
            break;
        case ErrorCode::OutOfOrderEvent:
        case ErrorCode::UnorderedStream:
            status = 409;
            break;
        case ErrorCode::EmptyCorpus:
        case ErrorCode::UnknownLabelInCorpus:
        case ErrorCode::UntrainedModel:
            status = 500;
            break;
    }
    return ApiError{status, std::string(to_string(error.code())), error.what(), error.detail()};
}

json StreamItem::to_json() const {
    return json{{"index", index}, {"at", entry.at}, {"type", to_string(entry.type)}, {"body", entry.body}};
}

struct SessionService::Hosted {
    Hosted(std::shared_ptr<const EngineResources> resources, ClockMode mode, double started)
        : session(std::move(resources)), clock(mode), started_at(started) {}

    mutable std::mutex mutex;
    mutable std::condition_variable changed;
    Session session;
    ClockMode clock;
    double started_at;
    std::size_t next_tick = 1;
    std::string created_at;
};

namespace {

double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ClockMode parse_clock(const json& request) {
    const auto text = request.value("clock", std::string("client"));
    if (text == "client") return ClockMode::Client;
    if (text == "wall") return ClockMode::Wall;
    throw Error(ErrorCode::InvalidArgument, "clock must be 'client' or 'wall'");
}

}  // namespace

SessionService::SessionService(ConfigSource base_config, WallClock clock)
    : base_config_(std::move(base_config)), clock_(clock ? std::move(clock) : WallClock(steady_seconds)) {
    std::random_device rd;
    id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

SessionService::~SessionService() = default;

std::string SessionService::new_session_id() {
    // splitmix64 step over a random seed
    id_state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = id_state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    char buf[24];
    std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>(z));
    return buf;
}

json SessionService::create_session(const json& request) {
    require_known_fields(request, {"scenario", "scenario_path", "config", "catalog", "clock"}, "create_session");
    const ClockMode mode = parse_clock(request);
    if (request.contains("scenario") == request.contains("scenario_path")) {
        throw Error(ErrorCode::InvalidArgument, "give exactly one of 'scenario' or 'scenario_path'");
    }

    Scenario scenario;
    fs::path scenario_dir = data_dir() / "scenarios";
    try {
        if (request.contains("scenario")) {
            scenario = parse_scenario(request.at("scenario"));
        } else {
            const fs::path path = resolve_data_ref(request.at("scenario_path").get<std::string>(), "scenarios");
            scenario = load_scenario_file(path);
            scenario_dir = path.parent_path();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ScenarioInvalid, std::string("scenario: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ScenarioInvalid) throw;
        throw Error(ErrorCode::ScenarioInvalid, e.what(), e.detail());
    }

    const EngineConfig config = base_config_.patched(request.value("config", json(nullptr))).parse();
    std::optional<AssistanceCatalog> catalog;
    if (request.contains("catalog")) catalog = parse_catalog(request.at("catalog"));
    auto resources = load_resources(std::move(scenario), scenario_dir, config, std::move(catalog));

    auto hosted = std::make_shared<Hosted>(std::move(resources), mode, clock_());
    hosted->created_at = utc_timestamp();
    std::string id;
    {
        std::unique_lock lock(registry_mutex_);
        do {
            id = new_session_id();
        } while (sessions_.count(id));
        sessions_.emplace(id, hosted);
    }
    std::lock_guard lock(hosted->mutex);
    return json{{"session_id", id},
                {"clock", mode == ClockMode::Wall ? "wall" : "client"},
                {"created_at", hosted->created_at},
                {"state", hosted->session.state_view()}};
}

std::shared_ptr<SessionService::Hosted> SessionService::find(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
    return it->second;
}

void SessionService::catch_up_ticks(Hosted& hosted, double now) {
    const double period = hosted.session.resources().config.pacing.tick_period_s;
    while (hosted.session.state().status == SessionStatus::Active &&
           static_cast<double>(hosted.next_tick) * period <= now) {
        hosted.session.ingest(SessionEvent{static_cast<double>(hosted.next_tick) * period, Tick{}});
        ++hosted.next_tick;
    }
}

json SessionService::post_event(const std::string& id, const json& event) {
    auto hosted = find(id);
    std::unique_lock lock(hosted->mutex);
    if (hosted->session.state().status != SessionStatus::Active) {
        throw Error(ErrorCode::SessionClosed, "session '" + id + "' is " +
                                                  std::string(to_string(hosted->session.state().status)));
    }
    SessionEvent parsed;
    if (hosted->clock == ClockMode::Wall) {
        const double now = clock_() - hosted->started_at;
        catch_up_ticks(*hosted, now);
        hosted->changed.notify_all();
        json body = event;
        if (body.is_object()) body.erase("at");
        parsed = event_from_json(body, now);
    } else {
        parsed = event_from_json(event);
    }
    const auto emitted = hosted->session.ingest(parsed);
    hosted->changed.notify_all();
    return json{{"accepted", true},
                {"emitted", emitted ? to_json(*emitted) : json(nullptr)},
                {"state", hosted->session.state_view()}};
}

json SessionService::state(const std::string& id) const {
    auto hosted = find(id);
    std::lock_guard lock(hosted->mutex);
    return json{{"session_id", id}, {"state", hosted->session.state_view()}};
}

std::vector<StreamItem> SessionService::decisions_since(const std::string& id, std::optional<std::size_t> since,
                                                        std::chrono::milliseconds wait) const {
    auto hosted = find(id);
    std::unique_lock lock(hosted->mutex);
    const std::size_t from = since ? *since + 1 : 0;
    auto collect = [&] {
        std::vector<StreamItem> out;
        const auto& entries = hosted->session.log().entries;
        for (std::size_t i = from; i < entries.size(); ++i) {
            if (is_decision_entry(entries[i].type)) out.push_back(StreamItem{i, entries[i]});
        }
        return out;
    };
    auto items = collect();
    if (items.empty() && wait.count() > 0 && hosted->session.state().status == SessionStatus::Active) {
        hosted->changed.wait_for(lock, wait);
        items = collect();
    }
    return items;
}

bool SessionService::is_active(const std::string& id) const {
    auto hosted = find(id);
    std::lock_guard lock(hosted->mutex);
    return hosted->session.state().status == SessionStatus::Active;
}

void SessionService::advance_wall_clocks() {
    std::vector<std::shared_ptr<Hosted>> wall;
    {
        std::shared_lock lock(registry_mutex_);
        for (const auto& [id, hosted] : sessions_) {
            if (hosted->clock == ClockMode::Wall) wall.push_back(hosted);
        }
    }
    const double now = clock_();
    for (const auto& hosted : wall) {
        std::lock_guard lock(hosted->mutex);
        catch_up_ticks(*hosted, now - hosted->started_at);
        hosted->changed.notify_all();
    }
}

std::size_t SessionService::session_count() const {
    std::shared_lock lock(registry_mutex_);
    return sessions_.size();
}

// --------------------------------------------------------------------- HTTP

struct HttpGateway::Impl {
    explicit Impl(SessionService& s) : service(s) {}

    SessionService& service;
    httplib::Server server;
    std::thread ticker;
    std::atomic<bool> running{false};
    std::mutex ticker_mutex;
    std::condition_variable ticker_cv;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ApiError& error) { send_json(res, error.http_status, error.to_json()); }

template <class Fn>
void guarded(httplib::Response& res, Fn fn) {
    try {
        fn();
    } catch (const Error& e) {
        send_error(res, to_api_error(e));
    } catch (const json::exception& e) {
        send_error(res, ApiError{400, "ParseError", e.what(), nullptr});
    } catch (const std::exception& e) {
        send_error(res, ApiError{500, "Internal", e.what(), nullptr});
    }
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("request body: ") + e.what());
    }
}

std::string sse_frame(const StreamItem& item) {
    return "id: " + std::to_string(item.index) + "\nevent: " + std::string(to_string(item.entry.type)) +
           "\ndata: " + item.to_json().dump() + "\n\n";
}

std::optional<std::size_t> since_param(const httplib::Request& req) {
    if (!req.has_param("since")) return std::nullopt;
    const auto text = req.get_param_value("since");
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        if (v < 0) return std::nullopt;
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidArgument, "since must be an integer");
    }
}

}  // namespace

HttpGateway::HttpGateway(SessionService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& server = impl_->server;
    SessionService& svc = service;

    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/healthz", [&svc](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, json{{"status", "ok"}, {"sessions", svc.session_count()}});
    });

    server.Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 201, svc.create_session(parse_body(req))); });
    });

    server.Post(R"(/sessions/([^/]+)/events)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, svc.post_event(req.matches[1], parse_body(req))); });
    });

    server.Get(R"(/sessions/([^/]+)/state)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, svc.state(req.matches[1])); });
    });

    server.Get(R"(/sessions/([^/]+)/stream)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string id = req.matches[1];
            const auto since = since_param(req);
            const bool follow = req.get_param_value("follow") != "0";
            auto initial = svc.decisions_since(id, since);
            if (!follow) {
                std::string body;
                for (const auto& item : initial) body += sse_frame(item);
                res.status = 200;
                res.set_content(body, "text/event-stream");
                return;
            }
            auto cursor = std::make_shared<std::optional<std::size_t>>(since);
            auto pending = std::make_shared<std::vector<StreamItem>>(std::move(initial));
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider(
                "text/event-stream", [&svc, id, cursor, pending](std::size_t, httplib::DataSink& sink) {
                    try {
                        if (pending->empty()) *pending = svc.decisions_since(id, *cursor, std::chrono::seconds(1));
                        for (const auto& item : *pending) {
                            const auto frame = sse_frame(item);
                            if (!sink.write(frame.data(), frame.size())) return false;
                            *cursor = item.index;
                        }
                        const bool drained = pending->empty();
                        pending->clear();
                        if (drained && !svc.is_active(id)) {
                            // Catch entries logged between the last read and closing.
                            auto tail = svc.decisions_since(id, *cursor);
                            for (const auto& item : tail) {
                                const auto frame = sse_frame(item);
                                if (!sink.write(frame.data(), frame.size())) return false;
                            }
                            sink.done();
                        } else if (drained) {
                            static const std::string keepalive = ": keepalive\n\n";
                            if (!sink.write(keepalive.data(), keepalive.size())) return false;
                        }
                        return true;
                    } catch (const std::exception&) {
                        return false;
                    }
                });
        });
    });
}

HttpGateway::~HttpGateway() { stop(); }

int HttpGateway::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpGateway::listen() {
    impl_->running = true;
    impl_->ticker = std::thread([impl = impl_.get()] {
        std::unique_lock lock(impl->ticker_mutex);
        while (impl->running) {
            lock.unlock();
            impl->service.advance_wall_clocks();
            lock.lock();
            impl->ticker_cv.wait_for(lock, std::chrono::milliseconds(100), [impl] { return !impl->running; });
        }
    });
    impl_->server.listen_after_bind();
}

void HttpGateway::stop() {
    if (!impl_) return;
    impl_->server.stop();
    {
        std::lock_guard lock(impl_->ticker_mutex);
        impl_->running = false;
    }
    impl_->ticker_cv.notify_all();
    if (impl_->ticker.joinable()) impl_->ticker.join();
}

std::pair<std::string, int> parse_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    std::string host = colon == std::string::npos ? addr : addr.substr(0, colon);
    if (host.empty()) host = "127.0.0.1";
    int port = 8080;
    if (colon != std::string::npos) {
        try {
            std::size_t used = 0;
            port = std::stoi(addr.substr(colon + 1), &used);
            if (used != addr.size() - colon - 1 || port < 0 || port > 65535) throw std::out_of_range(addr);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, "bad address '" + addr + "'");
        }
    }
    return {host, port};
}

}  // namespace aide
