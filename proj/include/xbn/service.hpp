#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "xbn/error.hpp"
#include "xbn/model.hpp"

namespace xbn {

/// In-memory network store plus the HTTP API handlers. Handlers are plain
/// functions of the request so they can be tested without a socket.
class Service {
public:
    struct Response {
        int status = 200;
        std::string body;
        std::string content_type = "application/json";
    };

    /// Starts with "builtin:asia" registered.
    Service();

    /// POST /api/networks: BIF text or native JSON.
    Response register_network(std::string_view body);
    /// GET /api/networks
    Response list_networks() const;
    /// GET /api/networks/{id}
    Response get_network(const std::string& id) const;
    /// POST /api/networks/{id}/query
    Response query(const std::string& id, std::string_view body) const;

    std::shared_ptr<const BayesianNetwork> find(const std::string& id) const;

    /// HTTP status for an error kind (404, 422, 409, 413, 400).
    static int status_for(ErrorKind kind);
    /// {"code", "message", "detail"} with the matching status.
    static Response error_response(const Error& e);

private:
    struct Entry {
        std::shared_ptr<const BayesianNetwork> network;
        std::string name;
        std::chrono::system_clock::time_point uploaded;
    };

    mutable std::shared_mutex mutex_;
    std::map<std::string, Entry> networks_;
    std::size_t next_id_ = 1;
};

/// Serves a Service over HTTP on a background thread.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port (port 0 picks a free port) and returns the bound port.
    /// Throws UsageError when the address cannot be bound.
    int start(const std::string& host, int port);
    /// Blocks until stop() is called from another thread or a signal.
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace xbn
