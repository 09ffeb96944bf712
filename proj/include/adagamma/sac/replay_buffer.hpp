#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "adagamma/gamma/losses.hpp"
#include "adagamma/numerics/matrix.hpp"
#include "adagamma/numerics/rng.hpp"

namespace adagamma::sac {

struct Transition {
    Vec s;
    Vec a;
    double r = 0.0;
    Vec s_next;
    bool terminal = false;
    std::uint64_t episode = 0;
    int step_index = 0;
};

/// Uniform ring buffer with episode-contiguous n-step extraction. Windows
/// start at any stored transition and follow physically consecutive slots
/// while they belong to the same episode; they stop after a terminal and
/// never span two episodes (ring overwrites break the episode-id chain).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ < 1) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
        store_.reserve(std::min<std::size_t>(capacity_, 1 << 20));
    }

    std::size_t size() const { return store_.size(); }
    std::size_t capacity() const { return capacity_; }

    void push(Transition t) {
        if (store_.size() < capacity_) {
            store_.push_back(std::move(t));
        } else {
            store_[next_] = std::move(t);
        }
        next_ = (next_ + 1) % capacity_;
    }

    const Transition& at(std::size_t i) const { return store_[i]; }

    const Transition& sample(Rng& rng) const {
        return store_[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(size()) - 1))];
    }

    std::vector<const Transition*> sample_batch(std::size_t batch, Rng& rng) const {
        std::vector<const Transition*> out;
        out.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) out.push_back(&sample(rng));
        return out;
    }

    /// Builds the window starting at slot `start`: up to n transitions from
    /// one episode, stopping after a terminal. The bootstrap state is the
    /// last transition's successor; a terminal tail drops the bootstrap.
    NStepWindow extract_window(std::size_t start, int n) const {
        if (n < 1) throw std::invalid_argument("ReplayBuffer: window length must be >= 1");
        if (start >= size()) throw std::out_of_range("ReplayBuffer: bad window start");
        const Transition& head = store_[start];
        NStepWindow w;
        w.s0 = head.s;
        w.s1 = head.s_next;
        w.rewards.reserve(n);

        std::size_t idx = start;
        int expected_step = head.step_index;
        for (int k = 0; k < n; ++k) {
            const Transition& t = store_[idx];
            if (t.episode != head.episode || t.step_index != expected_step) break;
            w.rewards.push_back(t.r);
            w.sn = t.s_next;
            w.tail_terminal = t.terminal;
            if (t.terminal) break;
            const std::size_t next_idx = (idx + 1) % capacity_;
            if (next_idx >= size() || next_idx == this->next_when_full()) break;
            idx = next_idx;
            expected_step += 1;
        }
        return w;
    }

    std::vector<NStepWindow> sample_windows(std::size_t batch, int n, Rng& rng) const {
        std::vector<NStepWindow> out;
        out.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const std::size_t start =
                static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(size()) - 1));
            out.push_back(extract_window(start, n));
        }
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> store_;

    // when the ring is full, slot `next_` is the oldest record and its
    // physical predecessor is the newest; a window may not walk past it
    std::size_t next_when_full() const {
        return store_.size() == capacity_ ? next_ : static_cast<std::size_t>(-1);
    }
};

} // namespace adagamma::sac
