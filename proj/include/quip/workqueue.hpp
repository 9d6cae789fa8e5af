#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quip {

enum class WorkStatus { Pending, Described, Failed };
std::string_view to_string(WorkStatus s);
std::optional<WorkStatus> parse_work_status(std::string_view s);

struct WorkItem {
  std::string id;
  WorkStatus status = WorkStatus::Pending;
  unsigned attempts = 0;
  std::string message;  // last failure, empty otherwise
  bool operator==(const WorkItem&) const = default;
};

// Per-video processing state persisted as `id<TAB>status<TAB>attempts<TAB>message`
// lines, in the order videos were first enqueued. Thread-safe; every
// mutation rewrites the file atomically.
class WorkQueue {
 public:
  // A missing file gives an empty queue bound to `path`. An empty path keeps
  // the queue in memory only.
  static WorkQueue open(const std::filesystem::path& path);
  static WorkQueue parse(std::string_view text, std::filesystem::path path = {});

  WorkQueue() = default;
  WorkQueue(WorkQueue&& o) noexcept;

  // Adds `id` as Pending unless already known.
  void enqueue(const std::string& id);
  // Pending or Failed ids, in queue order.
  std::vector<std::string> outstanding() const;
  void mark_described(const std::string& id);
  void mark_failed(const std::string& id, std::string_view message);

  std::optional<WorkItem> find(std::string_view id) const;
  std::vector<WorkItem> items() const;
  std::string serialize() const;

 private:
  WorkItem& item(const std::string& id);
  void save_locked() const;
  std::string serialize_locked() const;

  std::filesystem::path path_;
  std::vector<WorkItem> items_;
  std::map<std::string, std::size_t, std::less<>> index_;
  mutable std::mutex mu_;
};

struct QueueRunSummary {
  std::size_t described = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // already Described before this run
};

// Enqueues `ids`, then hands every outstanding one among them to exactly
// one of at most `concurrency` workers. `process` returning normally marks
// the item Described; any exception marks it Failed with its message.
QueueRunSummary run_queue(WorkQueue& queue, std::span<const std::string> ids, unsigned concurrency,
                          const std::function<void(const std::string&)>& process);

}  // namespace quip
