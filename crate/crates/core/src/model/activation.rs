//! Activation-stack simulation over scenario messages.
//!
//! The simulator replays messages in order against a single stack of active
//! participants, bottom entry being the transaction originator:
//!
//! * `trans-msg` starts a new transaction: the stack is cleared, then the
//!   sender and the receiver are pushed.
//! * A call message (`direct-msg`, `view`, `pure`, `fallback`, `create` and
//!   a solid-arrow ether transfer) requires its sender to be active.
//!   Activations nested above the sender are popped first, modelling the
//!   implicit return of finished calls, then the receiver is pushed. On an
//!   empty stack the sender is taken to start the interaction.
//! * A dashed ether transfer (`-->`) returns value along with control: it is
//!   valid only from the current top of the stack to the activation directly
//!   below it, and pops the sender.
//!
//! A call that lands on a participant still present deeper in the stack is
//! re-entrant; those arrivals are reported separately from nesting
//! violations so the design checker can turn them into findings.

use super::{Message, MessageKind, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationViolation {
    /// Index into `scenario.messages`.
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReentrantCall {
    /// Index into `scenario.messages`.
    pub index: usize,
    /// The participant entered again while one of its activations is still
    /// on the stack.
    pub callee: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActivationReport {
    pub violations: Vec<ActivationViolation>,
    pub reentries: Vec<ReentrantCall>,
}

pub fn simulate_activations(scenario: &Scenario) -> ActivationReport {
    let mut report = ActivationReport::default();
    let mut stack: Vec<String> = Vec::new();

    for (index, msg) in scenario.messages.iter().enumerate() {
        match msg.kind {
            MessageKind::TransMsg => {
                stack.clear();
                stack.push(msg.from.clone());
                stack.push(msg.to.clone());
            }
            MessageKind::EtherTransfer if msg.return_arrow => {
                let fits = stack.len() >= 2
                    && stack[stack.len() - 1] == msg.from
                    && stack[stack.len() - 2] == msg.to;
                if fits {
                    stack.pop();
                } else {
                    report.violations.push(ActivationViolation {
                        index,
                        reason: return_reason(msg, &stack),
                    });
                }
            }
            _ => {
                match stack.iter().rposition(|a| *a == msg.from) {
                    Some(pos) => stack.truncate(pos + 1),
                    None if stack.is_empty() => stack.push(msg.from.clone()),
                    None => {
                        report.violations.push(ActivationViolation {
                            index,
                            reason: format!(
                                "`{}` sends a call but is not active at this point",
                                msg.from
                            ),
                        });
                        stack.clear();
                        stack.push(msg.from.clone());
                    }
                }
                if msg.to != msg.from && stack.iter().any(|a| *a == msg.to) {
                    report.reentries.push(ReentrantCall {
                        index,
                        callee: msg.to.clone(),
                    });
                }
                stack.push(msg.to.clone());
            }
        }
    }
    report
}

fn return_reason(msg: &Message, stack: &[String]) -> String {
    match stack.last() {
        None => format!(
            "`{}` returns ether but no call is active",
            msg.from
        ),
        Some(top) if *top != msg.from => format!(
            "`{}` returns ether but the active participant is `{top}`",
            msg.from
        ),
        _ => format!(
            "`{}` returns ether to `{}`, which is not the caller below it",
            msg.from, msg.to
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Participant, ParticipantKind, ActorKind};
    use crate::span::SourceSpan;

    fn msg(from: &str, to: &str, kind: MessageKind, ret: bool) -> Message {
        Message {
            from: from.into(),
            to: to.into(),
            label: String::new(),
            kind,
            return_arrow: ret,
            span: SourceSpan::synthetic(),
        }
    }

    fn scenario(messages: Vec<Message>) -> Scenario {
        Scenario {
            name: "t".into(),
            participants: vec![
                Participant {
                    alias: "u".into(),
                    kind: ParticipantKind::Actor(ActorKind::Person),
                    span: SourceSpan::synthetic(),
                },
            ],
            messages,
            span: SourceSpan::synthetic(),
        }
    }

    #[test]
    fn plain_call_chain_is_clean() {
        let sc = scenario(vec![
            msg("u", "a", MessageKind::TransMsg, false),
            msg("a", "b", MessageKind::DirectMsg, false),
            msg("b", "c", MessageKind::DirectMsg, false),
        ]);
        let r = simulate_activations(&sc);
        assert!(r.violations.is_empty());
        assert!(r.reentries.is_empty());
    }

    #[test]
    fn sibling_call_pops_finished_activation() {
        // After a->b finishes, a may call c without an explicit return.
        let sc = scenario(vec![
            msg("u", "a", MessageKind::TransMsg, false),
            msg("a", "b", MessageKind::DirectMsg, false),
            msg("a", "c", MessageKind::DirectMsg, false),
        ]);
        let r = simulate_activations(&sc);
        assert!(r.violations.is_empty());
        assert!(r.reentries.is_empty());
    }

    #[test]
    fn callback_into_open_activation_is_reentrant() {
        let sc = scenario(vec![
            msg("u", "bank", MessageKind::TransMsg, false),
            msg("bank", "evil", MessageKind::DirectMsg, false),
            msg("evil", "bank", MessageKind::DirectMsg, false),
        ]);
        let r = simulate_activations(&sc);
        assert!(r.violations.is_empty());
        assert_eq!(
            r.reentries,
            vec![ReentrantCall {
                index: 2,
                callee: "bank".into()
            }]
        );
    }

    #[test]
    fn self_call_is_not_reentrant() {
        let sc = scenario(vec![
            msg("u", "a", MessageKind::TransMsg, false),
            msg("a", "a", MessageKind::View, false),
        ]);
        let r = simulate_activations(&sc);
        assert!(r.reentries.is_empty());
    }

    #[test]
    fn new_transaction_resets_the_stack() {
        let sc = scenario(vec![
            msg("u", "a", MessageKind::TransMsg, false),
            msg("a", "b", MessageKind::DirectMsg, false),
            msg("u", "b", MessageKind::TransMsg, false),
            msg("b", "a", MessageKind::DirectMsg, false),
        ]);
        let r = simulate_activations(&sc);
        assert!(r.violations.is_empty());
        assert!(r.reentries.is_empty());
    }

    #[test]
    fn inactive_sender_is_a_violation() {
        let sc = scenario(vec![
            msg("u", "a", MessageKind::TransMsg, false),
            msg("b", "c", MessageKind::DirectMsg, false),
        ]);
        let r = simulate_activations(&sc);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].index, 1);
    }

    #[test]
    fn ether_return_must_match_the_open_call() {
        let sc = scenario(vec![
            msg("u", "a", MessageKind::TransMsg, false),
            msg("a", "b", MessageKind::DirectMsg, false),
            msg("b", "a", MessageKind::EtherTransfer, true),
            msg("a", "u", MessageKind::EtherTransfer, true),
        ]);
        let r = simulate_activations(&sc);
        assert!(r.violations.is_empty());

        let bad = scenario(vec![
            msg("u", "a", MessageKind::TransMsg, false),
            msg("a", "b", MessageKind::DirectMsg, false),
            msg("a", "u", MessageKind::EtherTransfer, true),
        ]);
        let r = simulate_activations(&bad);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].index, 2);
    }

    #[test]
    fn solid_ether_transfer_activates_the_receiver() {
        // Sending ether to a contract runs its fallback, which may call back:
        // the classic re-entrancy shape with value transfers.
        let sc = scenario(vec![
            msg("u", "bank", MessageKind::TransMsg, false),
            msg("bank", "evil", MessageKind::EtherTransfer, false),
            msg("evil", "bank", MessageKind::DirectMsg, false),
        ]);
        let r = simulate_activations(&sc);
        assert!(r.violations.is_empty());
        assert_eq!(r.reentries.len(), 1);
        assert_eq!(r.reentries[0].callee, "bank");
    }

    #[test]
    fn interaction_may_start_without_a_transaction() {
        let sc = scenario(vec![msg("a", "b", MessageKind::DirectMsg, false)]);
        let r = simulate_activations(&sc);
        assert!(r.violations.is_empty());
    }
}
