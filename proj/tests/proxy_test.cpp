#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "ipts/proxy/cdr.hpp"
#include "ipts/proxy/config.hpp"
#include "ipts/proxy/routing.hpp"
#include "ipts/reg/store.hpp"
#include "ipts/sip/build.hpp"
#include "ipts/util/pattern.hpp"

using namespace ipts;
using proxy::Disposition;
using proxy::FeatureKind;
using proxy::RouteExternal;
using proxy::RouteFeature;
using proxy::RouteInternal;
using proxy::RouteReject;

TEST_CASE("digit pattern matching") {
    CHECK(util::digit_pattern_match("3042", "30XX"));
    CHECK(util::digit_pattern_match("3000", "30XX"));
    CHECK_FALSE(util::digit_pattern_match("3142", "30XX"));
    CHECK_FALSE(util::digit_pattern_match("304", "30XX"));
    CHECK_FALSE(util::digit_pattern_match("30425", "30XX"));
    CHECK_FALSE(util::digit_pattern_match("30a2", "30XX"));

    CHECK(util::digit_pattern_match("913525550123", "9."));
    CHECK(util::digit_pattern_match("91", "9."));
    CHECK_FALSE(util::digit_pattern_match("9", "9."));
    CHECK_FALSE(util::digit_pattern_match("8123", "9."));
    CHECK_FALSE(util::digit_pattern_match("9abc", "9."));

    CHECK(util::digit_pattern_match("2001", "2001"));
    CHECK_FALSE(util::digit_pattern_match("2001", "2002"));
    CHECK(util::digit_pattern_match("5", "X"));
    CHECK_FALSE(util::digit_pattern_match("", "X"));
    CHECK_FALSE(util::digit_pattern_match("5", ""));

    // '.' anywhere but last is never satisfiable.
    CHECK_FALSE(util::digit_pattern_match("1234", "1.4"));
}

TEST_CASE("literal pattern detection") {
    CHECK(util::pattern_is_literal("2001"));
    CHECK_FALSE(util::pattern_is_literal("30XX"));
    CHECK_FALSE(util::pattern_is_literal("9."));
}

TEST_CASE("proxy config defaults and overrides") {
    auto cfg = proxy::parse_proxy_config("");
    CHECK(cfg.listen_port == 5060);
    CHECK(cfg.realm == "pbx");
    CHECK(cfg.external_prefix == "9");
    CHECK(cfg.conference_pattern == "30XX");
    CHECK(cfg.max_forwards_default == 70);
    CHECK(cfg.max_message_bytes == 16384);
    CHECK(cfg.no_answer_ms == 20000);
    CHECK(cfg.b2bua_addr.to_string() == "127.0.0.1:5080");

    auto full = proxy::parse_proxy_config(
        "[server]\n"
        "host = 127.0.0.1\n"
        "port = 5062\n"
        "realm = pbx\n"
        "users = /tmp/u.csv\n"
        "journal = /tmp/b.journal\n"
        "cdr = /tmp/cdr.csv\n"
        "max_forwards = 20\n"
        "no_answer_ms = 9000\n"
        "[dialplan]\n"
        "external_prefix = 8\n"
        "conference_pattern = 77XX\n"
        "voicemail_ext = 4100\n"
        "ivr_ext = 4110\n"
        "moh_ext = 4120\n"
        "[trunk]\n"
        "b2bua = 127.0.0.1:5090\n"
        "media = 127.0.0.1:14000\n");
    CHECK(full.listen_port == 5062);
    CHECK(full.users_path == "/tmp/u.csv");
    CHECK(full.max_forwards_default == 20);
    CHECK(full.no_answer_ms == 9000);
    CHECK(full.external_prefix == "8");
    CHECK(full.conference_pattern == "77XX");
    CHECK(full.voicemail_ext == "4100");
    CHECK(full.b2bua_addr.port == 5090);
    CHECK(full.media_addr.port == 14000);
}

TEST_CASE("proxy config rejects bad input") {
    CHECK_THROWS(proxy::parse_proxy_config("[server]\nbogus_key = 1\n"));
    CHECK_THROWS(proxy::parse_proxy_config("[nonsense]\nx = 1\n"));
    CHECK_THROWS(proxy::parse_proxy_config("[server]\nport = 99999\n"));
    CHECK_THROWS(proxy::parse_proxy_config("[trunk]\nb2bua = nonsense\n"));
    // Feature extensions must stay pairwise distinct and off the trunk prefix.
    CHECK_THROWS(proxy::parse_proxy_config("[dialplan]\nvoicemail_ext = 4010\n"));
    CHECK_THROWS(proxy::parse_proxy_config("[dialplan]\nmoh_ext = 9020\n"));
    CHECK_THROWS(proxy::parse_proxy_config("[dialplan]\nexternal_prefix = 91\n"));
    CHECK_THROWS(proxy::parse_proxy_config("[dialplan]\nconference_pattern = 3a!\n"));
}

namespace {

sip::SipRequest make_invite(const std::string& target_user) {
    sip::SipUri target;
    target.user = target_user;
    target.host = "pbx";
    sip::Via via;
    via.host = "127.0.0.1";
    via.port = 6001;
    via.params.emplace_back("branch", "z9hG4bK-sanity1");
    return sip::RequestBuilder(sip::SipMethod::Invite, target)
        .via(via)
        .from(sip::name_addr(proxy::aor_uri("2001", "pbx"), "ft1"))
        .to(sip::name_addr(target))
        .call_id("sanity-call-1")
        .cseq(1)
        .max_forwards(70)
        .build();
}

constexpr int64_t kNowS = 1'000'000'000;

struct RouteFixture {
    reg::LocationStore store;
    proxy::ProxyConfig cfg;
    reg::Subscriber alice;  // Internal privilege
    reg::Subscriber bob;    // External privilege

    RouteFixture() {
        store.load_users_text(
            "2001,Alice Harper,00112233445566778899aabbccddeeff,Internal\n"
            "2002,Bob Keane,00112233445566778899aabbccddee00,External\n"
            "2003,Carol Diaz,00112233445566778899aabbccddee01,Internal\n",
            "fixture");
        alice = *store.find_subscriber("2001");
        bob = *store.find_subscriber("2002");
        add_contact("2001", "sip:2001@127.0.0.1:6001");
        add_contact("2002", "sip:2002@127.0.0.1:6002");
        add_contact("2002", "sip:2002@127.0.0.1:6003");
        // 2003 stays bindingless.
    }

    void add_contact(const std::string& ext, const std::string& contact,
                     int64_t expires_at = kNowS + 3600) {
        reg::Binding b;
        b.aor = proxy::aor_uri(ext, cfg.realm);
        b.contact = *sip::SipUri::parse(contact);
        b.registered_at = kNowS - 10;
        b.expires_at = expires_at;
        store.add_binding(b);
    }

    proxy::RoutingDecision route(const std::string& dialed,
                                 const reg::Subscriber& caller) const {
        return proxy::route(dialed, caller, store, cfg, kNowS);
    }
};

}  // namespace

TEST_CASE("sanity check screens requests") {
    proxy::ProxyConfig cfg;
    auto req = make_invite("2002");
    auto wire = sip::serialize_message(req);

    CHECK_FALSE(proxy::sanity_check(req, wire.size(), cfg).has_value());

    auto too_big = proxy::sanity_check(req, 20 * 1024, cfg);
    REQUIRE(too_big.has_value());
    CHECK(too_big->code == 413);

    auto hops = make_invite("2002");
    hops.set_header("Max-Forwards", "0");
    auto spent = proxy::sanity_check(hops, 512, cfg);
    REQUIRE(spent.has_value());
    CHECK(spent->code == 483);

    hops.set_header("Max-Forwards", "-3");
    CHECK(proxy::sanity_check(hops, 512, cfg)->code == 483);

    hops.set_header("Max-Forwards", "junk");
    CHECK(proxy::sanity_check(hops, 512, cfg)->code == 400);

    auto headless = make_invite("2002");
    headless.remove_header("To");
    auto missing = proxy::sanity_check(headless, 512, cfg);
    REQUIRE(missing.has_value());
    CHECK(missing->code == 400);
}

TEST_CASE("routing: registered extension goes internal") {
    RouteFixture f;
    auto d = f.route("2002", f.alice);
    auto* internal = std::get_if<RouteInternal>(&d);
    REQUIRE(internal != nullptr);
    CHECK(internal->contacts.size() == 2);

    auto single = f.route("2001", f.bob);
    REQUIRE(std::holds_alternative<RouteInternal>(single));
    CHECK(std::get<RouteInternal>(single).contacts.size() == 1);
    CHECK(std::get<RouteInternal>(single).contacts[0].contact.port == uint16_t{6001});
}

TEST_CASE("routing: external prefix strips and gates on privilege") {
    RouteFixture f;
    auto d = f.route("913525550123", f.bob);
    auto* ext = std::get_if<RouteExternal>(&d);
    REQUIRE(ext != nullptr);
    CHECK(ext->trunk_digits == "13525550123");

    auto denied = f.route("913525550123", f.alice);
    auto* rej = std::get_if<RouteReject>(&denied);
    REQUIRE(rej != nullptr);
    CHECK(rej->status.code == 403);

    // Prefix beats every later rule, even for conference-shaped remainders.
    auto shadow = f.route("93042", f.bob);
    REQUIRE(std::holds_alternative<RouteExternal>(shadow));
    CHECK(std::get<RouteExternal>(shadow).trunk_digits == "3042");

    // A bare prefix strips to nothing dialable.
    auto bare = f.route("9", f.bob);
    REQUIRE(std::holds_alternative<RouteReject>(bare));
    CHECK(std::get<RouteReject>(bare).status.code == 404);
}

TEST_CASE("routing: conference and feature extensions") {
    RouteFixture f;
    auto conf = f.route("3042", f.alice);
    auto* feat = std::get_if<RouteFeature>(&conf);
    REQUIRE(feat != nullptr);
    CHECK(feat->kind == FeatureKind::Conference);
    CHECK(feat->arg == "3042");

    auto vm = f.route("4000", f.alice);
    REQUIRE(std::holds_alternative<RouteFeature>(vm));
    CHECK(std::get<RouteFeature>(vm).kind == FeatureKind::Voicemail);
    CHECK(std::get<RouteFeature>(vm).arg == "2001");  // own mailbox

    auto ivr = f.route("4010", f.alice);
    REQUIRE(std::holds_alternative<RouteFeature>(ivr));
    CHECK(std::get<RouteFeature>(ivr).kind == FeatureKind::Ivr);

    auto moh = f.route("4020", f.alice);
    REQUIRE(std::holds_alternative<RouteFeature>(moh));
    CHECK(std::get<RouteFeature>(moh).kind == FeatureKind::Moh);
}

TEST_CASE("routing: bindingless and unknown extensions") {
    RouteFixture f;
    auto vm = f.route("2003", f.alice);
    auto* feat = std::get_if<RouteFeature>(&vm);
    REQUIRE(feat != nullptr);
    CHECK(feat->kind == FeatureKind::Voicemail);
    CHECK(feat->arg == "2003");

    auto unknown = f.route("2999", f.alice);
    REQUIRE(std::holds_alternative<RouteReject>(unknown));
    CHECK(std::get<RouteReject>(unknown).status.code == 404);

    // Expired bindings count as absent.
    RouteFixture g;
    g.add_contact("2003", "sip:2003@127.0.0.1:6004", kNowS - 5);
    auto expired = g.route("2003", g.alice);
    REQUIRE(std::holds_alternative<RouteFeature>(expired));
    CHECK(std::get<RouteFeature>(expired).kind == FeatureKind::Voicemail);
}

TEST_CASE("routing totality and rule consistency over random digit strings") {
    RouteFixture f;
    std::mt19937_64 rng(20260823);
    std::uniform_int_distribution<int> len_dist(1, 12);
    std::uniform_int_distribution<int> digit_dist(0, 9);

    for (int iter = 0; iter < 2000; ++iter) {
        std::string dialed;
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i) dialed.push_back(static_cast<char>('0' + digit_dist(rng)));
        const auto& caller = (iter % 2 == 0) ? f.alice : f.bob;
        auto d = f.route(dialed, caller);

        // Restate the routing rules as postconditions on whichever arm fired.
        if (auto* ext = std::get_if<RouteExternal>(&d)) {
            CHECK(caller.privilege == reg::Privilege::External);
            CHECK(dialed == f.cfg.external_prefix + ext->trunk_digits);
        } else if (auto* rej = std::get_if<RouteReject>(&d)) {
            if (rej->status.code == 403) {
                CHECK(caller.privilege == reg::Privilege::Internal);
                CHECK(dialed.starts_with(f.cfg.external_prefix));
            } else {
                CHECK(rej->status.code == 404);
            }
        } else if (auto* feat = std::get_if<RouteFeature>(&d)) {
            CHECK_FALSE(dialed.starts_with(f.cfg.external_prefix));
            if (feat->kind == FeatureKind::Conference)
                CHECK(util::digit_pattern_match(dialed, f.cfg.conference_pattern));
        } else {
            auto& internal = std::get<RouteInternal>(d);
            CHECK_FALSE(internal.contacts.empty());
            CHECK(f.store.find_subscriber(dialed) != nullptr);
        }
    }
}

TEST_CASE("best final response prefers 6xx then lowest code") {
    using sip::StatusCode;
    auto best = [](std::initializer_list<int> codes) {
        std::vector<StatusCode> v;
        for (int c : codes) v.emplace_back(c);
        return proxy::best_final_response(v).code;
    };

    // All ordered pairs over the busy/unavailable/decline trio.
    CHECK(best({486, 480}) == 480);
    CHECK(best({480, 486}) == 480);
    CHECK(best({486, 603}) == 603);
    CHECK(best({603, 486}) == 603);
    CHECK(best({480, 603}) == 603);
    CHECK(best({603, 480}) == 603);
    CHECK(best({486, 486}) == 486);
    CHECK(best({480, 480}) == 480);
    CHECK(best({603, 603}) == 603);

    // Triples in every order keep the same winner.
    CHECK(best({486, 480, 603}) == 603);
    CHECK(best({603, 486, 480}) == 603);
    CHECK(best({480, 603, 486}) == 603);

    CHECK(best({500, 486}) == 486);
    CHECK(best({600, 603}) == 600);
    CHECK(best({486}) == 486);
    // Provisionals never win; an empty set degrades to 500.
    CHECK(best({180, 486}) == 486);
    CHECK(best({}) == 500);
}

TEST_CASE("cdr formatting and file round trip") {
    proxy::Cdr answered;
    answered.call_id = "cid-1";
    answered.caller = "sip:2001@pbx";
    answered.callee = "sip:2002@pbx";
    answered.start_ms = 10'000;
    answered.answer_ms = 12'000;
    answered.end_ms = 14'500;
    answered.disposition = Disposition::Answered;
    CHECK(answered.duration_ms() == 2500);
    CHECK(answered.csv_line() ==
          "cid-1,sip:2001@pbx,sip:2002@pbx,10000,12000,14500,2500,Answered");

    proxy::Cdr cancelled;
    cancelled.call_id = "cid-2";
    cancelled.caller = "sip:2001@pbx";
    cancelled.callee = "sip:2002@pbx";
    cancelled.start_ms = 20'000;
    cancelled.end_ms = 21'000;
    cancelled.disposition = Disposition::Cancelled;
    CHECK(cancelled.duration_ms() == 0);
    CHECK(cancelled.csv_line() == "cid-2,sip:2001@pbx,sip:2002@pbx,20000,,21000,0,Cancelled");

    auto dir = std::filesystem::temp_directory_path() / "ipts_cdr_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "cdr.csv").string();
    std::filesystem::remove(path);
    {
        proxy::CdrWriter w(path);
        w.append(answered);
    }
    {
        // Reopening must not duplicate the header.
        proxy::CdrWriter w(path);
        w.append(cancelled);
    }
    auto rows = proxy::read_cdrs(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].call_id == "cid-1");
    CHECK(rows[0].answer_ms == int64_t{12'000});
    CHECK(rows[0].duration_ms() == 2500);
    CHECK(rows[1].disposition == Disposition::Cancelled);
    CHECK_FALSE(rows[1].answer_ms.has_value());

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == proxy::kCdrHeader);
    std::filesystem::remove_all(dir);
}

TEST_CASE("disposition names round trip") {
    for (auto d : {Disposition::Answered, Disposition::NoAnswer, Disposition::Busy,
                   Disposition::Failed, Disposition::Cancelled})
        CHECK(proxy::disposition_from(proxy::to_string(d)) == d);
    CHECK_FALSE(proxy::disposition_from("Abandoned").has_value());
}
