#include "xbn/service.hpp"

#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "xbn/format.hpp"
#include "xbn/json_io.hpp"
#include "xbn/query.hpp"

namespace xbn {

namespace {

std::string_view code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return "invalid_parameters";
        case ErrorKind::Validation: return "invalid_network";
        case ErrorKind::Parse: return "parse_error";
        case ErrorKind::ImpossibleEvidence: return "impossible_evidence";
        case ErrorKind::DegenerateExplanation: return "degenerate_explanation";
        case ErrorKind::GuardExceeded: return "guard_exceeded";
        case ErrorKind::NotFound: return "not_found";
    }
    return "error";
}

Service::Response json_response(int status, const json& body) {
    return {status, canonical_dump(body) + "\n", "application/json"};
}

json diagnostic_json(const ParseDiagnostic& d) {
    return {{"line", d.line},
            {"column", d.column},
            {"message", d.message},
            {"severity", d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning"}};
}

std::string iso8601(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

Service::Service() {
    auto asia = std::make_shared<const BayesianNetwork>(builtin_asia());
    networks_.emplace(std::string(kBuiltinAsia),
                      Entry{asia, asia->name(), std::chrono::system_clock::now()});
}

int Service::status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Usage:
        case ErrorKind::DegenerateExplanation: return 422;
        case ErrorKind::ImpossibleEvidence: return 409;
        case ErrorKind::GuardExceeded: return 413;
        case ErrorKind::Parse:
        case ErrorKind::Validation: return 400;
    }
    return 500;
}

Service::Response Service::error_response(const Error& e) {
    json detail = nullptr;
    if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
        detail = diagnostic_json(pe->diagnostic());
    } else if (auto* ve = dynamic_cast<const ValidationError*>(&e); ve && !ve->variable().empty()) {
        detail = {{"variable", ve->variable()}};
    }
    return json_response(status_for(e.kind()),
                         {{"code", code_for(e.kind())}, {"message", e.what()}, {"detail", detail}});
}

std::shared_ptr<const BayesianNetwork> Service::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = networks_.find(id);
    return it == networks_.end() ? nullptr : it->second.network;
}

Service::Response Service::register_network(std::string_view body) {
    std::vector<ParseDiagnostic> warnings;
    std::shared_ptr<const BayesianNetwork> net;
    try {
        net = std::make_shared<const BayesianNetwork>(parse_network(body, &warnings));
    } catch (const Error& e) {
        spdlog::info("register rejected: {}", e.what());
        return error_response(e);
    }
    std::string id;
    {
        std::unique_lock lock(mutex_);
        id = "net-" + std::to_string(next_id_++);
        networks_.emplace(id, Entry{net, net->name(), std::chrono::system_clock::now()});
    }
    spdlog::info("registered {} ({}, {} variables)", id, net->name(), net->size());
    json w = json::array();
    for (const auto& d : warnings) w.push_back(diagnostic_json(d));
    return json_response(201, {{"id", id}, {"name", net->name()}, {"warnings", w}});
}

Service::Response Service::list_networks() const {
    json list = json::array();
    std::shared_lock lock(mutex_);
    for (const auto& [id, e] : networks_)
        list.push_back({{"id", id},
                        {"name", e.name},
                        {"variables", e.network->size()},
                        {"uploaded", iso8601(e.uploaded)}});
    return json_response(200, {{"networks", list}});
}

Service::Response Service::get_network(const std::string& id) const {
    auto net = find(id);
    if (!net) return error_response(NotFoundError("unknown network id '" + id + "'"));
    json doc = network_to_json(*net);
    json arcs = json::array();
    for (auto [p, c] : net->arcs()) arcs.push_back({net->variable(p).name, net->variable(c).name});
    doc["id"] = id;
    doc["arcs"] = std::move(arcs);
    return json_response(200, doc);
}

Service::Response Service::query(const std::string& id, std::string_view body) const {
    auto net = find(id);
    if (!net) return error_response(NotFoundError("unknown network id '" + id + "'"));
    json request;
    try {
        request = json::parse(body.begin(), body.end());
    } catch (const json::parse_error& e) {
        return json_response(400, {{"code", "bad_request"}, {"message", e.what()}, {"detail", nullptr}});
    }
    try {
        json result = api::execute(*net, request);
        spdlog::debug("query {} {} ok", id, request.value("operation", ""));
        return json_response(200, result);
    } catch (const Error& e) {
        spdlog::info("query {} failed: {}", id, e.what());
        return error_response(e);
    } catch (const json::exception& e) {
        return error_response(UsageError(e.what()));
    }
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;
    std::thread thread;

    explicit Impl(Service& s) : service(s) {
        auto reply = [](httplib::Response& res, const Service::Response& r) {
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        server.Post("/api/networks", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.register_network(req.body));
        });
        server.Get("/api/networks", [this, reply](const httplib::Request&, httplib::Response& res) {
            reply(res, service.list_networks());
        });
        server.Get(R"(/api/networks/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.get_network(req.matches[1]));
        });
        server.Post(R"(/api/networks/([^/]+)/query)",
                    [this, reply](const httplib::Request& req, httplib::Response& res) {
                        reply(res, service.query(req.matches[1], req.body));
                    });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string message = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                message = e.what();
            } catch (...) {
            }
            spdlog::error("unhandled exception: {}", message);
            res.status = 500;
            res.set_content(canonical_dump({{"code", "internal"}, {"message", message}, {"detail", nullptr}}) + "\n",
                            "application/json");
        });
        server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
            spdlog::info("{} {} -> {}", req.method, req.path, res.status);
        });
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : impl_->server.bind_to_port(host, port) ? port : -1;
    if (bound < 0) throw UsageError("cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    spdlog::info("listening on {}:{}", host, bound);
    return bound;
}

void HttpServer::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::stop() {
    impl_->server.stop();
    wait();
}

}  // namespace xbn
