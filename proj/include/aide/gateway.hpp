#pragma once
// HTTP/JSON session service. SessionService holds the sessions and knows
// nothing about HTTP; HttpGateway maps routes onto it.
//
//   POST /sessions                 create a session
//   POST /sessions/{id}/events     ingest one event
//   GET  /sessions/{id}/state      current state view
//   GET  /sessions/{id}/stream     server-sent decision entries (?since=k&follow=0|1)
//   GET  /healthz

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "aide/config.hpp"
#include "aide/error.hpp"
#include "aide/session.hpp"

namespace aide {

struct ApiError {
    int http_status = 500;
    std::string code;
    std::string message;
    nlohmann::json detail;

    nlohmann::json to_json() const;
};

ApiError to_api_error(const Error& error);

enum class ClockMode : std::uint8_t { Client, Wall };

struct StreamItem {
    std::size_t index = 0;
    LogEntry entry;

    nlohmann::json to_json() const;  // {"index", "at", "type", "body"}
};

class SessionService {
public:
    using WallClock = std::function<double()>;  // monotone seconds

    explicit SessionService(ConfigSource base_config, WallClock clock = {});
    ~SessionService();

    // Returns {"session_id", "clock", "created_at", "state"}.
    nlohmann::json create_session(const nlohmann::json& request);
    // Returns {"accepted", "emitted", "state"}.
    nlohmann::json post_event(const std::string& id, const nlohmann::json& event);
    // Returns {"session_id", "state"}.
    nlohmann::json state(const std::string& id) const;

    // Decision entries with log index > since (all when since is empty).
    // With a positive wait, blocks until at least one is available or the
    // session is closed.
    std::vector<StreamItem> decisions_since(const std::string& id, std::optional<std::size_t> since,
                                            std::chrono::milliseconds wait = {}) const;
    bool is_active(const std::string& id) const;

    // Ingests the ticks that wall-clock sessions have come due for.
    void advance_wall_clocks();
    std::size_t session_count() const;

private:
    struct Hosted;
    std::shared_ptr<Hosted> find(const std::string& id) const;
    void catch_up_ticks(Hosted& hosted, double now);
    std::string new_session_id();

    ConfigSource base_config_;
    WallClock clock_;
    mutable std::shared_mutex registry_mutex_;
    std::unordered_map<std::string, std::shared_ptr<Hosted>> sessions_;
    std::uint64_t id_state_;
};

class HttpGateway {
public:
    explicit HttpGateway(SessionService& service);
    ~HttpGateway();
    HttpGateway(const HttpGateway&) = delete;
    HttpGateway& operator=(const HttpGateway&) = delete;

    // Returns the bound port (the chosen one when `port` is 0), or -1.
    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "host:port", "host", ":port" -> (host, port); port defaults to 8080.
std::pair<std::string, int> parse_addr(const std::string& addr);

}  // namespace aide
