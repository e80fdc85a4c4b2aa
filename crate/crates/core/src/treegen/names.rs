pub(super) const FEMALE: [&str; 40] = [
    "Laura", "Claudia", "Elena", "Amelie", "Luisa", "Emilia", "Alina", "Emily", "Helga", "Nina",
    "Lea", "Leonie", "Anna", "Marie", "Sophie", "Hannah", "Lena", "Clara", "Johanna", "Paula",
    "Greta", "Ida", "Frieda", "Mila", "Lina", "Charlotte", "Mia", "Emma", "Ella", "Maja",
    "Lotta", "Ronja", "Katharina", "Sabine", "Petra", "Ursula", "Monika", "Karin", "Jana", "Theresa",
];

pub(super) const MALE: [&str; 40] = [
    "Elias", "Fabian", "Thomas", "Patrick", "Samuel", "Jonathan", "Philipp", "Nico", "David", "Konstantin",
    "Florian", "Felix", "Stefan", "Gabriel", "Tobias", "Lukas", "Jonas", "Leon", "Finn", "Paul",
    "Ben", "Noah", "Luis", "Max", "Emil", "Anton", "Jakob", "Moritz", "Henri", "Oskar",
    "Matthias", "Andreas", "Michael", "Jan", "Simon", "Julian", "Tim", "Niklas", "Benedikt", "Johannes",
];
