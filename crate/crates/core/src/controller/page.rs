//! Row-buffer management after a column access.

use super::config::PagePolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PageAction {
    KeepOpen,
    Precharge,
}

/// Decides whether the bank that just served a column access to `open_row`
/// precharges. `pending_rows` are the rows of buffered requests to that bank.
///
/// - Open: never precharge.
/// - Closed: always precharge.
/// - OpenAdaptive: keep the row unless a conflicting request is waiting and no
///   request for the open row is.
/// - ClosedAdaptive: precharge unless a request for the open row is waiting.
pub fn apply_page_policy(policy: PagePolicy, open_row: u32, pending_rows: impl IntoIterator<Item = u32>) -> PageAction {
    let (mut hit, mut conflict) = (false, false);
    if matches!(policy, PagePolicy::OpenAdaptive | PagePolicy::ClosedAdaptive) {
        for row in pending_rows {
            if row == open_row {
                hit = true;
                break;
            }
            conflict = true;
        }
    }
    let keep = match policy {
        PagePolicy::Open => true,
        PagePolicy::Closed => false,
        PagePolicy::OpenAdaptive => hit || !conflict,
        PagePolicy::ClosedAdaptive => hit,
    };
    if keep {
        PageAction::KeepOpen
    } else {
        PageAction::Precharge
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use PageAction::*;

    #[test]
    fn static_policies_ignore_the_buffer() {
        assert_eq!(apply_page_policy(PagePolicy::Open, 3, []), KeepOpen);
        assert_eq!(apply_page_policy(PagePolicy::Open, 3, [4]), KeepOpen);
        assert_eq!(apply_page_policy(PagePolicy::Closed, 3, [3]), Precharge);
        assert_eq!(apply_page_policy(PagePolicy::Closed, 3, []), Precharge);
    }

    #[test]
    fn open_adaptive() {
        assert_eq!(apply_page_policy(PagePolicy::OpenAdaptive, 3, [3]), KeepOpen);
        assert_eq!(apply_page_policy(PagePolicy::OpenAdaptive, 3, []), KeepOpen);
        assert_eq!(apply_page_policy(PagePolicy::OpenAdaptive, 3, [5]), Precharge);
        assert_eq!(apply_page_policy(PagePolicy::OpenAdaptive, 3, [5, 3]), KeepOpen);
    }

    #[test]
    fn closed_adaptive() {
        assert_eq!(apply_page_policy(PagePolicy::ClosedAdaptive, 3, [3]), KeepOpen);
        assert_eq!(apply_page_policy(PagePolicy::ClosedAdaptive, 3, []), Precharge);
        assert_eq!(apply_page_policy(PagePolicy::ClosedAdaptive, 3, [5]), Precharge);
    }
}
