use std::time::Duration;

use crate::model::{NodeLabel, QNodeId};

/// Counters collected while a plan runs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExecStats {
    /// Reads from operator inputs, the initial read included.
    pub advances: u64,
    /// Invocations of the holistic head-selection function.
    pub getnext_calls: u64,
    /// Pushes plus pops over all stacks.
    pub stack_ops: u64,
    /// Peak number of entries held in self, inherited and pending lists.
    pub list_peak: u64,
    /// Peak number of data nodes held in any dynamic structure at one instant.
    pub mu: u64,
    pub result_rows: u64,
    pub wall_time: Duration,
}

/// Mutable state threaded through every operator call of one execution.
#[derive(Debug, Default)]
pub struct ExecContext {
    pub(crate) stats: ExecStats,
    live_nodes: u64,
    list_entries: u64,
    push_log: Option<Vec<(QNodeId, NodeLabel)>>,
    violation: Option<String>,
}

impl ExecContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_push_log() -> Self {
        ExecContext {
            push_log: Some(Vec::new()),
            ..Self::default()
        }
    }

    pub fn stats(&self) -> &ExecStats {
        &self.stats
    }

    pub fn into_stats(self) -> ExecStats {
        self.stats
    }

    #[inline]
    pub(crate) fn advance(&mut self) {
        self.stats.advances += 1;
    }

    #[inline]
    pub(crate) fn getnext(&mut self) {
        self.stats.getnext_calls += 1;
    }

    /// A stack push holding `nodes` data nodes.
    #[inline]
    pub(crate) fn push(&mut self, nodes: usize) {
        self.stats.stack_ops += 1;
        self.grow(nodes as u64);
    }

    #[inline]
    pub(crate) fn pop(&mut self, nodes: usize) {
        self.stats.stack_ops += 1;
        self.live_nodes -= nodes as u64;
    }

    /// One list entry holding `nodes` data nodes was buffered.
    #[inline]
    pub(crate) fn list_add(&mut self, nodes: usize) {
        self.list_entries += 1;
        self.stats.list_peak = self.stats.list_peak.max(self.list_entries);
        self.grow(nodes as u64);
    }

    #[inline]
    pub(crate) fn list_remove(&mut self, nodes: usize) {
        self.list_entries -= 1;
        self.live_nodes -= nodes as u64;
    }

    /// Storage outside stacks and lists, such as buffered path solutions.
    #[inline]
    pub(crate) fn hold(&mut self, nodes: usize) {
        self.grow(nodes as u64);
    }

    #[inline]
    pub(crate) fn release(&mut self, nodes: usize) {
        self.live_nodes -= nodes as u64;
    }

    #[inline]
    fn grow(&mut self, nodes: u64) {
        self.live_nodes += nodes;
        self.stats.mu = self.stats.mu.max(self.live_nodes);
    }

    pub(crate) fn log_push(&mut self, q: QNodeId, label: NodeLabel) {
        if let Some(log) = &mut self.push_log {
            log.push((q, label));
        }
    }

    pub fn push_log(&self) -> Option<&[(QNodeId, NodeLabel)]> {
        self.push_log.as_deref()
    }

    pub(crate) fn flag_violation(&mut self, msg: String) {
        self.violation.get_or_insert(msg);
    }

    pub fn violation(&self) -> Option<&str> {
        self.violation.as_deref()
    }

    pub(crate) fn take_push_log(&mut self) -> Option<Vec<(QNodeId, NodeLabel)>> {
        self.push_log.take()
    }
}
