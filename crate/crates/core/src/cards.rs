//! Cards, the deck, seats and hands.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::RuleConfig;
use crate::error::EngineError;
use crate::rng::GameRng;

/// Face value carried by both Jokers. It ranks below every ingredient face,
/// so a Joker play beats anything on the pizza.
pub const JOKER_FACE: u8 = 0;
/// Highest ingredient face; the least rare card.
pub const MAX_FACE: u8 = 11;
pub const JOKER_COUNT: usize = 2;
pub const DECK_SIZE: usize = 68;
pub const SEATS: usize = 4;
pub const HAND_SIZE: usize = DECK_SIZE / SEATS;

/// Stable identity of a physical card within the deck (0..68).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CardId(pub u8);

impl fmt::Display for CardId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Card {
    pub face: u8,
    pub golden: bool,
    pub uid: CardId,
}

impl Card {
    pub fn is_joker(&self) -> bool {
        self.face == JOKER_FACE
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.face, self.golden) {
            (JOKER_FACE, _) => write!(f, "J{}", self.uid),
            (face, true) => write!(f, "{face}*{}", self.uid),
            (face, false) => write!(f, "{face}{}", self.uid),
        }
    }
}

/// A place at the table. Seats are numbered clockwise 0..4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seat(pub u8);

impl Seat {
    pub const ALL: [Seat; SEATS] = [Seat(0), Seat(1), Seat(2), Seat(3)];

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    /// The seat `steps` places clockwise from this one.
    pub fn clockwise(self, steps: u8) -> Seat {
        Seat((self.0 + steps) % SEATS as u8)
    }

    pub fn from_index(index: usize) -> Option<Seat> {
        (index < SEATS).then_some(Seat(index as u8))
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seat {}", self.0)
    }
}

/// A set of seats, stored as a bitmask. Serializes as an ascending list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SeatSet(u8);

impl SeatSet {
    pub const EMPTY: SeatSet = SeatSet(0);
    pub const ALL: SeatSet = SeatSet(0b1111);

    pub fn contains(self, seat: Seat) -> bool {
        self.0 & (1 << seat.0) != 0
    }

    pub fn insert(&mut self, seat: Seat) -> bool {
        let fresh = !self.contains(seat);
        self.0 |= 1 << seat.0;
        fresh
    }

    pub fn remove(&mut self, seat: Seat) {
        self.0 &= !(1 << seat.0);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Seat> {
        Seat::ALL.into_iter().filter(move |s| self.contains(*s))
    }
}

impl FromIterator<Seat> for SeatSet {
    fn from_iter<I: IntoIterator<Item = Seat>>(iter: I) -> Self {
        let mut set = SeatSet::EMPTY;
        for seat in iter {
            set.insert(seat);
        }
        set
    }
}

impl Serialize for SeatSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for SeatSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let seats = Vec::<Seat>::deserialize(deserializer)?;
        if let Some(bad) = seats.iter().find(|s| s.index() >= SEATS) {
            return Err(serde::de::Error::custom(format!("seat {} out of range", bad.0)));
        }
        Ok(seats.into_iter().collect())
    }
}

/// The full deck in canonical order: faces ascending, the golden card last
/// among the 11s, Jokers last. A card's uid is its canonical position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deck {
    pub cards: Vec<Card>,
}

impl Deck {
    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    pub fn card(&self, uid: CardId) -> Option<&Card> {
        self.cards.get(usize::from(uid.0))
    }
}

/// Builds the standard 68-card deck: `N` copies of face `N` for 1..=11 plus two
/// Jokers.
pub fn build_deck(_config: &RuleConfig) -> Deck {
    standard_deck()
}

pub fn standard_deck() -> Deck {
    let mut cards = Vec::with_capacity(DECK_SIZE);
    for face in 1..=MAX_FACE {
        for copy in 0..face {
            let uid = CardId(cards.len() as u8);
            let golden = face == MAX_FACE && copy == MAX_FACE - 1;
            cards.push(Card { face, golden, uid });
        }
    }
    for _ in 0..JOKER_COUNT {
        let uid = CardId(cards.len() as u8);
        cards.push(Card {
            face: JOKER_FACE,
            golden: false,
            uid,
        });
    }
    Deck { cards }
}

/// Looks up a card of the standard deck by uid.
pub fn card_by_uid(uid: CardId) -> Option<Card> {
    let index = usize::from(uid.0);
    if index >= DECK_SIZE {
        return None;
    }
    if index >= DECK_SIZE - JOKER_COUNT {
        return Some(Card {
            face: JOKER_FACE,
            golden: false,
            uid,
        });
    }
    // Face N starts at the triangular number (N-1)N/2.
    let mut face = 1u8;
    while usize::from(face) * usize::from(face + 1) / 2 <= index {
        face += 1;
    }
    Some(Card {
        face,
        golden: index == DECK_SIZE - JOKER_COUNT - 1,
        uid,
    })
}

/// One seat's cards, kept sorted by uid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hand {
    pub owner: Seat,
    pub cards: Vec<Card>,
}

impl Hand {
    pub fn new(owner: Seat, mut cards: Vec<Card>) -> Self {
        cards.sort_unstable_by_key(|c| c.uid);
        Self { owner, cards }
    }

    pub fn empty(owner: Seat) -> Self {
        Self {
            owner,
            cards: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    pub fn get(&self, uid: CardId) -> Option<&Card> {
        self.cards
            .binary_search_by_key(&uid, |c| c.uid)
            .ok()
            .map(|i| &self.cards[i])
    }

    pub fn contains(&self, uid: CardId) -> bool {
        self.get(uid).is_some()
    }

    pub fn count_face(&self, face: u8) -> usize {
        self.cards.iter().filter(|c| c.face == face).count()
    }

    /// Cards of `face`, lowest uid first.
    pub fn cards_of_face(&self, face: u8) -> impl Iterator<Item = &Card> + '_ {
        self.cards.iter().filter(move |c| c.face == face)
    }

    pub fn holds_both_jokers(&self) -> bool {
        self.count_face(JOKER_FACE) == JOKER_COUNT
    }

    pub fn holds_golden(&self) -> bool {
        self.cards.iter().any(|c| c.golden)
    }

    /// True when every uid is held and no uid repeats.
    pub fn holds_all(&self, uids: &[CardId]) -> bool {
        uids.iter().enumerate().all(|(i, uid)| {
            self.contains(*uid) && !uids[..i].contains(uid)
        })
    }

    pub fn insert(&mut self, card: Card) {
        let pos = self
            .cards
            .binary_search_by_key(&card.uid, |c| c.uid)
            .unwrap_or_else(|p| p);
        self.cards.insert(pos, card);
    }

    /// Removes the given cards and returns them in the order requested.
    pub fn take(&mut self, uids: &[CardId]) -> Result<Vec<Card>, EngineError> {
        if !self.holds_all(uids) {
            return Err(EngineError::CardsNotHeld);
        }
        let mut taken = Vec::with_capacity(uids.len());
        for uid in uids {
            let pos = self
                .cards
                .binary_search_by_key(uid, |c| c.uid)
                .map_err(|_| EngineError::CardsNotHeld)?;
            taken.push(self.cards.remove(pos));
        }
        Ok(taken)
    }
}

/// Shuffles the deck with a generator seeded from `seed` and deals it
/// round-robin starting at seat 0.
pub fn deal(deck: &Deck, seed: u64, players: usize) -> Result<[Hand; SEATS], EngineError> {
    let mut rng = GameRng::from_seed(seed);
    deal_with(deck, &mut rng, players)
}

/// Same as [`deal`] but draws from an existing generator, advancing it.
pub fn deal_with(
    deck: &Deck,
    rng: &mut GameRng,
    players: usize,
) -> Result<[Hand; SEATS], EngineError> {
    if players != SEATS {
        return Err(EngineError::PlayerCountUnsupported(players));
    }
    let mut order = deck.cards.clone();
    rng.shuffle(&mut order);
    let mut hands = Seat::ALL.map(Hand::empty);
    for (k, card) in order.into_iter().enumerate() {
        hands[k % SEATS].cards.push(card);
    }
    for hand in &mut hands {
        hand.cards.sort_unstable_by_key(|c| c.uid);
    }
    Ok(hands)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_deck_composition() {
        let deck = standard_deck();
        assert_eq!(deck.len(), 68);
        for face in 1..=MAX_FACE {
            let n = deck.cards.iter().filter(|c| c.face == face).count();
            assert_eq!(n, usize::from(face), "face {face}");
        }
        assert_eq!(deck.cards.iter().filter(|c| c.is_joker()).count(), 2);
        let golden: Vec<_> = deck.cards.iter().filter(|c| c.golden).collect();
        assert_eq!(golden.len(), 1);
        assert_eq!(golden[0].face, 11);
        // canonical order: golden last among the 11s, jokers at the end
        assert_eq!(golden[0].uid, CardId(65));
        assert!(deck.cards[66].is_joker() && deck.cards[67].is_joker());
        for (i, c) in deck.cards.iter().enumerate() {
            assert_eq!(usize::from(c.uid.0), i);
        }
    }

    #[test]
    fn card_lookup_matches_deck() {
        let deck = standard_deck();
        for card in &deck.cards {
            assert_eq!(card_by_uid(card.uid), Some(*card));
        }
        assert_eq!(card_by_uid(CardId(68)), None);
    }

    #[test]
    fn deal_rejects_other_table_sizes() {
        let deck = standard_deck();
        assert!(matches!(
            deal(&deck, 1, 3),
            Err(EngineError::PlayerCountUnsupported(3))
        ));
        assert!(deal(&deck, 1, 5).is_err());
    }

    #[test]
    fn take_is_all_or_nothing() {
        let deck = standard_deck();
        let mut hand = Hand::new(Seat(0), deck.cards[..5].to_vec());
        assert!(hand.take(&[CardId(0), CardId(40)]).is_err());
        assert_eq!(hand.len(), 5);
        assert!(hand.take(&[CardId(1), CardId(1)]).is_err());
        let taken = hand.take(&[CardId(3), CardId(0)]).unwrap();
        assert_eq!(taken[0].uid, CardId(3));
        assert_eq!(hand.len(), 3);
    }
}
