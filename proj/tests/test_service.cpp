#include <random>
#include <thread>

#include "doctest.h"
#include "golden_files.hpp"
#include "httplib.h"
#include "parity_cases.hpp"
#include "support/random_network.hpp"
#include "xbn/format.hpp"
#include "xbn/service.hpp"

using namespace xbn;

TEST_SUITE("service") {
    TEST_CASE("builtin Asia is preregistered") {
        Service s;
        const auto list = s.list_networks();
        CHECK(list.status == 200);
        const json doc = json::parse(list.body);
        REQUIRE(doc["networks"].size() == 1);
        CHECK(doc["networks"][0]["id"] == "builtin:asia");
        CHECK(doc["networks"][0]["name"] == "Asia");

        const auto net = s.get_network("builtin:asia");
        CHECK(net.status == 200);
        const json structure = json::parse(net.body);
        CHECK(structure["variables"].size() == 8);
        CHECK(structure["arcs"].size() == 8);
        CHECK(structure["cpts"].size() == 8);
        CHECK(s.get_network("nope").status == 404);
    }

    TEST_CASE("registering networks") {
        Service s;
        const auto created = s.register_network(write_bif(builtin_asia()));
        CHECK(created.status == 201);
        const std::string id = json::parse(created.body)["id"];
        CHECK(id == "net-1");
        CHECK(approx_equal(*s.find(id), builtin_asia(), 0.0));

        // Re-uploading the structure document registers an equal network.
        const auto again = s.register_network(s.get_network(id).body);
        CHECK(again.status == 201);
        CHECK(approx_equal(*s.find(json::parse(again.body)["id"]), builtin_asia(), 0.0));

        const auto bad = s.register_network("network N {\n}\nvariable A {\n  type discrete [ 2 ] { yes no };\n}\n");
        CHECK(bad.status == 400);
        const json err = json::parse(bad.body);
        CHECK(err["code"] == "parse_error");
        CHECK(err["detail"]["line"] == 4);
        CHECK(err["detail"]["column"].get<int>() > 1);

        const auto invalid = s.register_network(R"({"variables": [{"name": "A", "states": ["a", "b"]}], "cpts": []})");
        CHECK(invalid.status == 400);
        CHECK(json::parse(invalid.body)["detail"]["variable"] == "A");
        CHECK(json::parse(s.list_networks().body)["networks"].size() == 3);
    }

    TEST_CASE("query error statuses") {
        Service s;
        auto status = [&](const std::string& id, const json& body) { return s.query(id, body.dump()).status; };
        CHECK(status("nope", {{"operation", "mpe"}}) == 404);
        CHECK(status("builtin:asia", {{"operation", "infer"}, {"targets", {"Nope"}}}) == 422);
        CHECK(status("builtin:asia", {{"operation", "infer"}, {"targets", {"Smoker"}}, {"evidence", "Smoker=yes"}}) == 422);
        CHECK(status("builtin:asia", {{"operation", "mpe"}, {"evidence", "LungCancer=yes,TbOrCancer=no"}}) == 409);
        CHECK(status("builtin:asia", {{"operation", "gbf"}, {"explanation", "LungCancer=yes,TbOrCancer=no"}}) == 422);
        CHECK(s.query("builtin:asia", "{not json").status == 400);

        std::mt19937_64 rng(4);
        const auto big = testing::random_network(rng, {.min_variables = 16, .max_variables = 16, .max_parents = 1});
        const std::string id = json::parse(s.register_network(write_network_json(big)).body)["id"];
        const auto guard = s.query(id, json{{"operation", "mre"}}.dump());
        CHECK(guard.status == 413);
        const json envelope = json::parse(guard.body);
        CHECK(envelope["code"] == "guard_exceeded");
        CHECK(envelope.contains("message"));
        CHECK(envelope.contains("detail"));
    }

    TEST_CASE("payloads equal the CLI golden files") {
        Service s;
        for (const auto& c : testing::parity_cases()) {
            CAPTURE(c.name);
            const auto r = s.query("builtin:asia", c.request.dump());
            REQUIRE(r.status == 200);
            CHECK(r.body == testing::golden(c.name, r.body));
        }
    }

    TEST_CASE("queries do not mutate registered networks") {
        Service s;
        const auto cases = testing::parity_cases();
        std::vector<std::string> first;
        for (const auto& c : cases) first.push_back(s.query("builtin:asia", c.request.dump()).body);
        for (std::size_t i = cases.size(); i-- > 0;)
            CHECK(s.query("builtin:asia", cases[i].request.dump()).body == first[i]);
        CHECK(approx_equal(*s.find("builtin:asia"), builtin_asia(), 0.0));
    }

    TEST_CASE("HTTP round trip on an ephemeral port") {
        Service s;
        HttpServer server(s);
        const int port = server.start("127.0.0.1", 0);
        REQUIRE(port > 0);
        httplib::Client client("127.0.0.1", port);

        const auto list = client.Get("/api/networks");
        REQUIRE(list);
        CHECK(list->status == 200);
        CHECK(list->get_header_value("Content-Type") == "application/json");

        const auto created = client.Post("/api/networks", write_bif(builtin_asia()), "text/plain");
        REQUIRE(created);
        CHECK(created->status == 201);
        const std::string id = json::parse(created->body)["id"];

        const auto structure = client.Get("/api/networks/" + id);
        REQUIRE(structure);
        CHECK(json::parse(structure->body)["arcs"].size() == 8);
        CHECK(client.Get("/api/networks/unknown")->status == 404);

        // Concurrent queries against the builtin and the upload agree with the goldens.
        const auto cases = testing::parity_cases();
        std::vector<std::thread> workers;
        std::vector<int> ok(cases.size(), 0);
        for (std::size_t i = 0; i < cases.size(); ++i)
            workers.emplace_back([&, i] {
                httplib::Client c("127.0.0.1", port);
                const auto a = c.Post("/api/networks/builtin:asia/query", cases[i].request.dump(), "application/json");
                const auto b = c.Post("/api/networks/" + id + "/query", cases[i].request.dump(), "application/json");
                ok[i] = a && b && a->status == 200 && a->body == b->body &&
                        a->body == testing::golden(cases[i].name, a->body);
            });
        for (auto& w : workers) w.join();
        for (std::size_t i = 0; i < cases.size(); ++i) {
            CAPTURE(cases[i].name);
            CHECK(ok[i] == 1);
        }

        const auto missing = client.Post("/api/networks/nope/query", "{}", "application/json");
        REQUIRE(missing);
        CHECK(missing->status == 404);
        server.stop();
    }
}
