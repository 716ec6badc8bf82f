#include "agentsec/wire.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

using namespace agentsec::wire;

// --- SSE framing -------------------------------------------------------------

TEST(Sse, EncodeExamples) {
  EXPECT_EQ(encode_sse(SseEvent::make("message", "hello")), "event: message\ndata: hello\n\n");
  EXPECT_EQ(encode_sse(SseEvent::make(std::nullopt, "a\nb")), "data: a\ndata: b\n\n");
  EXPECT_EQ(encode_sse(SseEvent::make(std::nullopt, "")), "data: \n\n");
}

TEST(Sse, DecodeExamples) {
  auto events = decode_sse("event: message\ndata: hello\n\n");
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].event_name, "message");
  EXPECT_EQ(events[0].data, "hello");

  events = decode_sse("data: a\ndata: b\n\ndata: c\n\n");
  ASSERT_EQ(events.size(), 2u);
  EXPECT_FALSE(events[0].event_name.has_value());
  EXPECT_EQ(events[0].data, "a\nb");
  EXPECT_EQ(events[1].data, "c");
}

TEST(Sse, MissingTerminatorIsMalformed) {
  EXPECT_THROW(decode_sse("data: dangling\n"), MalformedFrame);
  EXPECT_THROW(decode_sse("event: x\n"), MalformedFrame);
  EXPECT_THROW(decode_sse("data: partial line"), MalformedFrame);
  EXPECT_NO_THROW(decode_sse(""));
}

TEST(Sse, CarriageReturnsNormalizedAtConstruction) {
  auto e = SseEvent::make("m", "a\r\nb\rc");
  EXPECT_EQ(e.data, "a\nb\nc");
  EXPECT_THROW(SseEvent::make("two\nlines", "x"), std::invalid_argument);
  EXPECT_THROW(SseEvent::make("cr\rname", "x"), std::invalid_argument);
}

TEST(Sse, EmptyNameDistinctFromAbsent) {
  auto with_empty = decode_sse(encode_sse(SseEvent::make(std::string(""), "x")));
  ASSERT_EQ(with_empty.size(), 1u);
  EXPECT_EQ(with_empty[0].event_name, std::string(""));
  auto without = decode_sse(encode_sse(SseEvent::make(std::nullopt, "x")));
  EXPECT_FALSE(without[0].event_name.has_value());
}

// Round-trip property over 1000 randomized events (names, multi-line data,
// embedded CRs normalized at construction).
TEST(Sse, RoundTripProperty) {
  std::mt19937_64 rng(42);
  auto rand_text = [&](size_t max_len, bool allow_newlines) {
    static const std::string alphabet =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 _-.:=%{}[]";
    std::string s;
    size_t len = rng() % (max_len + 1);
    for (size_t i = 0; i < len; ++i) {
      unsigned pick = static_cast<unsigned>(rng() % (alphabet.size() + (allow_newlines ? 6 : 0)));
      if (pick < alphabet.size())
        s.push_back(alphabet[pick]);
      else if (pick % 2 == 0)
        s.push_back('\n');
      else
        s.push_back('\r');
    }
    return s;
  };

  for (int i = 0; i < 1000; ++i) {
    std::optional<std::string> name;
    if (rng() % 3 != 0) name = rand_text(12, false);
    SseEvent original = SseEvent::make(name, rand_text(80, true));
    auto decoded = decode_sse(encode_sse(original));
    ASSERT_EQ(decoded.size(), 1u) << "case " << i;
    EXPECT_EQ(decoded[0], original) << "case " << i;
  }
}

TEST(Sse, IncrementalDecoderMatchesWholeBuffer) {
  std::string bytes =
      encode_sse(SseEvent::make("transport", "transportId=t1")) +
      encode_sse(SseEvent::make("message", "payload=x\nsender=alice")) +
      encode_sse(SseEvent::make(std::nullopt, "tail"));
  auto whole = decode_sse(bytes);

  SseDecoder d;
  std::vector<SseEvent> incremental;
  for (size_t i = 0; i < bytes.size(); i += 3) {
    d.feed(std::string_view(bytes).substr(i, 3));
    for (auto& e : d.take_events()) incremental.push_back(e);
  }
  EXPECT_TRUE(d.at_frame_boundary());
  EXPECT_EQ(incremental, whole);
}

// --- Status vocabulary -------------------------------------------------------

TEST(Wire, StatusVocabulary) {
  for (int s : {200, 400, 401, 403, 409, 422, 429, 500}) EXPECT_TRUE(valid_status(s));
  for (int s : {201, 204, 301, 404, 418, 503}) EXPECT_FALSE(valid_status(s));
  EXPECT_THROW(make_response(404, "nope"), std::invalid_argument);
}

// --- Routing -----------------------------------------------------------------

namespace {

RouteTable demo_routes() {
  RouteTable routes;
  routes.add("POST", "/api/v1/sessions", [](Request&) -> HandlerResult {
    return make_response(200, "created");
  });
  routes.add("POST", "/api/v1/sessions/{session_id}/messages", [](Request& r) -> HandlerResult {
    return make_response(200, "msg:" + r.path_params["session_id"]);
  });
  routes.add("GET", "/boom", [](Request&) -> HandlerResult {
    throw std::runtime_error("handler exploded at /src/boom.kt:17");
  });
  routes.add("GET", "/echo-query", [](Request& r) -> HandlerResult {
    std::string out;
    for (auto& [k, v] : r.query) out += k + "=" + v + ";";
    return make_response(200, out);
  });
  routes.add("GET", "/stream/{id}", [](Request& r) -> HandlerResult {
    if (r.query.count("deny")) return make_response(403, "no");
    StreamAccept accept;
    std::string id = r.path_params["id"];
    accept.on_open = [id](StreamHandlePtr handle) {
      handle->send(SseEvent::make("hello", "id=" + id));
    };
    return accept;
  });
  return routes;
}

}  // namespace

TEST(Router, PatternCaptureAndFallthrough) {
  auto routes = demo_routes();

  Request r;
  r.method = "POST";
  r.path = "/api/v1/sessions/abc/messages";
  auto result = dispatch(routes, r);
  auto* resp = std::get_if<Response>(&result);
  ASSERT_NE(resp, nullptr);
  EXPECT_EQ(resp->body, "msg:abc");

  Request unknown;
  unknown.method = "GET";
  unknown.path = "/nope";
  result = dispatch(routes, unknown);
  resp = std::get_if<Response>(&result);
  ASSERT_NE(resp, nullptr);
  EXPECT_EQ(resp->status, 400);
  EXPECT_EQ(resp->body, kGenericErrorBody);

  Request wrong_method;
  wrong_method.method = "GET";
  wrong_method.path = "/api/v1/sessions";
  result = dispatch(routes, wrong_method);
  EXPECT_EQ(std::get<Response>(result).status, 400);
}

TEST(Router, HandlerExceptionSanitizedTo500) {
  auto routes = demo_routes();
  Request r;
  r.method = "GET";
  r.path = "/boom";
  auto result = dispatch(routes, r);
  auto& resp = std::get<Response>(result);
  EXPECT_EQ(resp.status, 500);
  EXPECT_EQ(resp.body, kGenericErrorBody);
  EXPECT_EQ(resp.body.find(".kt:"), std::string::npos);
}

TEST(Router, EmptyTableRefused) {
  EXPECT_THROW(serve(RouteTable{}, Backend::InProcess), std::invalid_argument);
}

// --- Target helpers ----------------------------------------------------------

TEST(Wire, TargetEncodingRoundTrip) {
  std::map<std::string, std::string> query = {{"privacyKey", "p k+/="}, {"agentId", "spoofed-agent-X"}};
  std::string target = encode_target("/sse/v1/abc", query);
  std::string path;
  std::map<std::string, std::string> parsed;
  split_target(target, path, parsed);
  EXPECT_EQ(path, "/sse/v1/abc");
  EXPECT_EQ(parsed, query);
}

// --- Backend behavior (parameterized over both backends) ---------------------

class BackendTest : public ::testing::TestWithParam<Backend> {
 protected:
  void SetUp() override { server_ = serve(demo_routes(), GetParam()); }
  void TearDown() override { server_->stop(); }
  std::unique_ptr<Server> server_;
};

TEST_P(BackendTest, PlainRequestResponse) {
  auto client = server_->make_client();
  Request r;
  r.method = "POST";
  r.path = "/api/v1/sessions";
  r.body = "agents=alice\n";
  auto resp = client->request(r);
  EXPECT_EQ(resp.status, 200);
  EXPECT_EQ(resp.body, "created");
}

TEST_P(BackendTest, QueryParametersSurviveTransport) {
  auto client = server_->make_client();
  Request r;
  r.method = "GET";
  r.path = "/echo-query";
  r.query = {{"a", "x y"}, {"b", "1&2=3"}};
  auto resp = client->request(r);
  EXPECT_EQ(resp.body, "a=x y;b=1&2=3;");
}

TEST_P(BackendTest, StreamAcceptAndRefuse) {
  auto client = server_->make_client();
  auto ok = client->open_stream("/stream/s7");
  ASSERT_TRUE(ok.accepted());
  ASSERT_TRUE(ok.stream->wait_for_events(1, std::chrono::milliseconds(2000)));
  auto events = ok.stream->events();
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].event_name, "hello");
  EXPECT_EQ(events[0].data, "id=s7");
  ok.stream->close();

  auto refused = client->open_stream("/stream/s7?deny=1");
  EXPECT_FALSE(refused.accepted());
  EXPECT_EQ(refused.status, 403);
}

TEST_P(BackendTest, UnknownRouteIsGeneric400) {
  auto client = server_->make_client();
  Request r;
  r.method = "GET";
  r.path = "/definitely/not/here";
  auto resp = client->request(r);
  EXPECT_EQ(resp.status, 400);
  EXPECT_EQ(resp.body, kGenericErrorBody);
}

TEST_P(BackendTest, HandlerExceptionIs500OverTransport) {
  auto client = server_->make_client();
  Request r;
  r.method = "GET";
  r.path = "/boom";
  auto resp = client->request(r);
  EXPECT_EQ(resp.status, 500);
  EXPECT_EQ(resp.body, kGenericErrorBody);
}

INSTANTIATE_TEST_SUITE_P(BothBackends, BackendTest,
                         ::testing::Values(Backend::InProcess, Backend::Loopback),
                         [](const ::testing::TestParamInfo<Backend>& info) {
                           return info.param == Backend::InProcess ? "InProcess" : "Loopback";
                         });

// --- Stream dispatch order and lifecycle -------------------------------------

TEST(Streams, PerStreamFifoOrder) {
  RouteTable routes;
  std::vector<StreamHandlePtr> handles;
  std::mutex mu;
  routes.add("GET", "/s", [&](Request&) -> HandlerResult {
    StreamAccept a;
    a.on_open = [&](StreamHandlePtr h) {
      std::lock_guard<std::mutex> lock(mu);
      handles.push_back(h);
    };
    return a;
  });
  auto server = serve(std::move(routes), Backend::InProcess);
  auto client = server->make_client();
  auto s = client->open_stream("/s");
  ASSERT_TRUE(s.accepted());
  for (int i = 0; i < 100; ++i)
    handles[0]->send(SseEvent::make("n", std::to_string(i)));
  auto events = s.stream->events();
  ASSERT_EQ(events.size(), 100u);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(events[i].data, std::to_string(i));
  server->stop();
}

TEST(Streams, ClosedHandleDropsSends) {
  RouteTable routes;
  StreamHandlePtr captured;
  routes.add("GET", "/s", [&](Request&) -> HandlerResult {
    StreamAccept a;
    a.on_open = [&](StreamHandlePtr h) { captured = h; };
    return a;
  });
  auto server = serve(std::move(routes), Backend::InProcess);
  auto client = server->make_client();
  auto s = client->open_stream("/s");
  ASSERT_TRUE(s.accepted());
  EXPECT_TRUE(captured->send(SseEvent::make(std::nullopt, "one")));
  s.stream->close();
  EXPECT_FALSE(captured->open());
  EXPECT_FALSE(captured->send(SseEvent::make(std::nullopt, "two")));
  EXPECT_EQ(s.stream->event_count(), 1u);
  server->stop();
}

TEST(Streams, SessionAffiliationTag) {
  auto h = std::make_shared<StreamHandle>(1);
  EXPECT_EQ(h->session(), "");
  h->set_session("sid-1");
  EXPECT_EQ(h->session(), "sid-1");
}

// Loopback must sustain at least 32 concurrent connections.
TEST(Loopback, ThirtyTwoConcurrentStreams) {
  RouteTable routes;
  std::mutex mu;
  std::vector<StreamHandlePtr> handles;
  routes.add("GET", "/s/{n}", [&](Request& r) -> HandlerResult {
    StreamAccept a;
    std::string n = r.path_params["n"];
    a.on_open = [&, n](StreamHandlePtr h) {
      h->send(SseEvent::make("hi", "n=" + n));
      std::lock_guard<std::mutex> lock(mu);
      handles.push_back(h);
    };
    return a;
  });
  auto server = serve(std::move(routes), Backend::Loopback);
  auto client = server->make_client();

  std::vector<StreamResult> streams;
  for (int i = 0; i < 32; ++i) {
    auto s = client->open_stream("/s/" + std::to_string(i));
    ASSERT_TRUE(s.accepted()) << i;
    streams.push_back(std::move(s));
  }
  for (int i = 0; i < 32; ++i)
    ASSERT_TRUE(streams[i].stream->wait_for_events(1, std::chrono::milliseconds(2000))) << i;
  {
    std::lock_guard<std::mutex> lock(mu);
    EXPECT_EQ(handles.size(), 32u);
    for (auto& h : handles) EXPECT_TRUE(h->open());
  }
  for (auto& s : streams) s.stream->close();
  server->stop();
}

// Identical scripted run on both backends yields identical observable
// sequences (statuses, bodies, per-stream events).
TEST(Backends, ObservableEquivalence) {
  auto run_script = [](Backend backend) {
    auto server = serve(demo_routes(), backend);
    auto client = server->make_client();
    std::vector<std::string> observations;

    Request r;
    r.method = "POST";
    r.path = "/api/v1/sessions";
    auto resp = client->request(r);
    observations.push_back(std::to_string(resp.status) + "|" + resp.body);

    auto s = client->open_stream("/stream/eq");
    observations.push_back(s.accepted() ? "accepted" : std::to_string(s.status));
    if (s.accepted()) {
      s.stream->wait_for_events(1, std::chrono::milliseconds(2000));
      for (auto& e : s.stream->events())
        observations.push_back(e.event_name.value_or("-") + "|" + e.data);
      s.stream->close();
    }

    Request bad;
    bad.method = "GET";
    bad.path = "/unknown";
    resp = client->request(bad);
    observations.push_back(std::to_string(resp.status) + "|" + resp.body);

    server->stop();
    return observations;
  };

  EXPECT_EQ(run_script(Backend::InProcess), run_script(Backend::Loopback));
}
