#include "quip/workqueue.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/log.hpp"

namespace quip {

std::string_view to_string(WorkStatus s) {
  switch (s) {
    case WorkStatus::Pending:
      return "Pending";
    case WorkStatus::Described:
      return "Described";
    case WorkStatus::Failed:
      return "Failed";
  }
  return "?";
}

std::optional<WorkStatus> parse_work_status(std::string_view s) {
  for (auto st : {WorkStatus::Pending, WorkStatus::Described, WorkStatus::Failed}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

WorkQueue::WorkQueue(WorkQueue&& o) noexcept
    : path_(std::move(o.path_)), items_(std::move(o.items_)), index_(std::move(o.index_)) {}

WorkQueue WorkQueue::open(const std::filesystem::path& path) {
  if (path.empty() || !std::filesystem::exists(path)) {
    WorkQueue q;
    q.path_ = path;
    return q;
  }
  return parse(fs::read_file(path), path);
}

WorkQueue WorkQueue::parse(std::string_view text, std::filesystem::path path) {
  WorkQueue q;
  q.path_ = std::move(path);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) throw SchemaError(n, "expected 4 tab-separated fields", q.path_.string());
      f.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    f.push_back(line.substr(start));
    auto status = parse_work_status(f[1]);
    if (f[0].empty() || !status) throw SchemaError(n, "bad id or status", q.path_.string());
    if (q.index_.count(f[0])) throw SchemaError(n, "duplicate id " + f[0], q.path_.string());
    unsigned attempts = 0;
    try {
      attempts = static_cast<unsigned>(std::stoul(f[2]));
    } catch (const std::exception&) {
      throw SchemaError(n, "bad attempt count", q.path_.string());
    }
    q.index_[f[0]] = q.items_.size();
    q.items_.push_back({f[0], *status, attempts, f[3]});
  }
  return q;
}

WorkItem& WorkQueue::item(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("work queue has no item '" + id + "'");
  return items_[it->second];
}

void WorkQueue::enqueue(const std::string& id) {
  std::lock_guard lock(mu_);
  if (index_.count(id)) return;
  index_[id] = items_.size();
  items_.push_back({id, WorkStatus::Pending, 0, {}});
  save_locked();
}

std::vector<std::string> WorkQueue::outstanding() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& it : items_) {
    if (it.status != WorkStatus::Described) out.push_back(it.id);
  }
  return out;
}

void WorkQueue::mark_described(const std::string& id) {
  std::lock_guard lock(mu_);
  WorkItem& w = item(id);
  w.status = WorkStatus::Described;
  ++w.attempts;
  w.message.clear();
  save_locked();
}

void WorkQueue::mark_failed(const std::string& id, std::string_view message) {
  std::lock_guard lock(mu_);
  WorkItem& w = item(id);
  w.status = WorkStatus::Failed;
  ++w.attempts;
  w.message.clear();
  for (char c : message) w.message.push_back(c == '\t' || c == '\n' || c == '\r' ? ' ' : c);
  save_locked();
}

std::optional<WorkItem> WorkQueue::find(std::string_view id) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return items_[it->second];
}

std::vector<WorkItem> WorkQueue::items() const {
  std::lock_guard lock(mu_);
  return items_;
}

std::string WorkQueue::serialize() const {
  std::lock_guard lock(mu_);
  return serialize_locked();
}

std::string WorkQueue::serialize_locked() const {
  std::string out;
  for (const auto& w : items_) {
    out += w.id + "\t" + std::string(to_string(w.status)) + "\t" + std::to_string(w.attempts) + "\t" + w.message + "\n";
  }
  return out;
}

void WorkQueue::save_locked() const {
  if (path_.empty()) return;
  fs::write_atomic(path_, serialize_locked());
}

QueueRunSummary run_queue(WorkQueue& queue, std::span<const std::string> ids, unsigned concurrency,
                          const std::function<void(const std::string&)>& process) {
  QueueRunSummary summary;
  std::vector<std::string> todo;
  for (const auto& id : ids) queue.enqueue(id);
  std::set<std::string> wanted(ids.begin(), ids.end());
  for (const auto& id : queue.outstanding()) {
    if (wanted.count(id)) todo.push_back(id);
  }
  summary.skipped = wanted.size() - todo.size();

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> described{0}, failed{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const std::string& id = todo[i];
      try {
        process(id);
        queue.mark_described(id);
        ++described;
      } catch (const std::exception& e) {
        queue.mark_failed(id, e.what());
        log::warn("video ", id, " failed: ", queue.find(id)->message);
        ++failed;
      }
    }
  };
  unsigned n = std::max(1u, std::min<unsigned>(concurrency, static_cast<unsigned>(std::max<std::size_t>(1, todo.size()))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  summary.described = described;
  summary.failed = failed;
  return summary;
}

}  // namespace quip
