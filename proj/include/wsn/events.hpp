#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "wsn/json_io.hpp"

namespace wsn::dash {

inline const std::set<std::string> kKnownTopics = {
    "measurement", "reconfiguration", "analysis", "failure"};

struct Subscription {
  std::string listener_id;
  std::string host;
  int port = 0;
  std::set<std::string> topics;

  void validate() const;  // well-formed endpoint, non-empty known topics
};

// Wire format of the event stream: 4-byte big-endian length prefix followed
// by a UTF-8 JSON body {topic, seq, body}.
std::string encode_frame(const std::string& body);

// Pushes events to registered listeners over TCP. Each listener has its own
// bounded queue and writer thread; when the queue is full the oldest frame
// is dropped and counted, so a slow listener never stalls the publisher.
class EventBus {
 public:
  explicit EventBus(std::size_t queue_capacity = 1024);
  ~EventBus();

  EventBus(const EventBus&) = delete;
  EventBus& operator=(const EventBus&) = delete;

  // Connects to the subscriber's endpoint; throws TransportError when it is
  // unreachable. Returns the subscription id.
  std::string register_listener(const Subscription& sub);

  // Fans the event out to every listener subscribed to `topic`.
  void publish(const std::string& topic, const Json& body);

  struct Counters {
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
  };
  Counters counters() const;
  std::size_t listener_count() const;

  void stop();

 private:
  struct Listener {
    Subscription sub;
    std::string id;
    int fd = -1;
    std::deque<std::string> queue;
    bool dead = false;
    bool stopping = false;
    std::mutex mutex;
    std::condition_variable cv;
    std::thread worker;
  };

  void writer_loop(Listener* listener);

  std::size_t queue_capacity_;
  mutable std::mutex mutex_;
  std::vector<std::unique_ptr<Listener>> listeners_;
  std::atomic<std::int64_t> next_event_seq_{1};
  std::atomic<std::int64_t> next_listener_seq_{1};
  std::atomic<std::int64_t> delivered_{0};
  std::atomic<std::int64_t> dropped_{0};
  std::atomic<bool> stopped_{false};
};

// Consumer-side helper: listens on an ephemeral localhost port, accepts
// connections from the event bus and collects decoded frames. Used by the
// integration tests and the `listen` debugging subcommand.
class FrameReceiver {
 public:
  FrameReceiver();
  ~FrameReceiver();

  int port() const { return port_; }

  std::vector<Json> frames() const;
  std::size_t frame_count() const;

  // Waits until at least `n` frames arrived; false on timeout.
  bool wait_for_frames(std::size_t n, int timeout_ms = 5000) const;

  void stop();

 private:
  void accept_loop();

  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  std::vector<Json> frames_;
  std::thread accept_thread_;
};

}  // namespace wsn::dash
