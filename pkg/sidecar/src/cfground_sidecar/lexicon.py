"""Compact part-of-speech lexicon for referring-expression head extraction.

Open-class coverage targets the vocabulary of grounding datasets: MS-COCO
categories and their common lexical variants, clothing, body parts, scene
furniture, and the verbs people use to describe poses and actions. Unknown
words default to NOUN (the open class), except for morphology that marks
verbs and adverbs.
"""

DETERMINERS = frozenset(
    "the a an this these those his her its their our my your some any "
    "each every no both either neither another other".split()
)

PREPOSITIONS = frozenset(
    "in on at by with without near beside behind under below above over "
    "between among against along across around from of to off onto into "
    "inside outside atop underneath beneath toward towards through during "
    "about beyond amid amidst upon next closest".split()
)

CONJUNCTIONS = frozenset("and or nor plus".split())

# Words that close the leading noun phrase and start a modifier clause.
RELATIVES = frozenset("who which whose where whom while than when".split())

PRONOUNS = frozenset(
    "it he she they them him you i we us something anything someone "
    "anyone everything itself himself herself themselves".split()
)

ADVERBS = frozenset(
    "very really quite too so most more less least partially slightly "
    "fully almost barely only just far farthest furthest away also there "
    "here not still upright".split()
)

NUMBERS = frozenset(
    "two three four five six seven eight nine ten eleven twelve first "
    "second third fourth fifth".split()
)

VERBS = frozenset(
    """is are was were be being been has have had am does do did seems seem
    holding wearing sitting standing looking walking running jumping riding
    eating drinking carrying playing hanging leaning lying laying facing
    touching reaching pointing smiling waving throwing catching hitting
    swinging kneeling crouching bending sleeping resting staring watching
    grabbing cutting feeding petting pushing pulling climbing surfing
    skating cooking serving talking spinning sliding driving flying
    swimming skiing jogging dancing singing reading writing typing drawing
    posing bowing stretching squatting waiting getting going coming moving
    turned parked placed positioned located covered dressed painted shown
    seen filled stacked tilted folded cropped blurred cut obscured hidden
    stands sits holds wears rides eats drinks carries plays hangs leans
    lies faces walks runs jumps looks smiles waves stands points reaches
    touches watches sleeps rests kneels bends crouches climbs drives flies
    swims skis surfs skates cooks serves talks spins slides""".split()
)

ADJECTIVES = frozenset(
    """red blue green yellow black white brown gray grey pink purple golden
    blond blonde dark bright colorful clear big small large little tall
    short long tiny huge giant smaller smallest bigger biggest larger
    largest taller tallest shorter longer older oldest younger youngest
    closer nearer darker lighter brighter deeper paler
    striped plaid checkered dotted fuzzy fluffy shiny old
    young new empty full half wooden plastic leather furry bald curly
    skinny fat chubby cute dirty clean pretty ugly happy sad angry open
    closed broken whole round square flat sharp soft hard wet dry hot cold
    warm cool fresh ripe sliced whole blurry visible partial upper lower
    far near deep shallow thick thin wide narrow heavy upside sideways
    leftmost rightmost topmost bottommost middle center central beige tan
    cream maroon navy teal olive silver""".split()
)

# Resolved to ADJ when the next token is nominal, NOUN otherwise.
ADJ_OR_NOUN = frozenset(
    "orange light glass back top front bottom side left right metal baby "
    "male female adult kid toy stone brick corner end".split()
)

NOUNS = frozenset(
    """person people man men woman women guy girl boy lady kid child
    children player rider driver skier surfer skater batter catcher
    pitcher umpire chef cook waiter waitress officer baby adult couple
    crowd group pair
    shirt tshirt jacket coat dress pants jeans shorts skirt hat cap helmet
    glove gloves shoe shoes boot boots sock socks scarf suit uniform
    sweater hoodie vest tie bowtie glasses sunglasses watch bag purse
    backpack belt button pocket sleeve hood logo stripe stripes spot spots
    pattern design
    table desk window door wall floor ceiling shelf bookshelf counter
    cabinet drawer mirror lamp rug carpet curtain pillow cushion blanket
    towel plate cup mug bowl bottle jar pot pan tray basket box container
    napkin fork knife spoon kettle teapot pitcher vase candle clock frame
    picture painting photo poster sign stand cart wagon bucket ladder
    tree bush grass field fence road street sidewalk path hill mountain
    sky cloud water river lake ocean beach sand rock flower plant leaf
    branch trunk log dirt mud snow ice puddle shadow
    food pizza sandwich burger hamburger salad soup bread toast cheese
    meat chicken steak bacon fruit apple banana grape berry strawberry
    lemon lime melon watermelon pineapple mango peach pear cherry cake
    donut doughnut cookie pie muffin pastry rice pasta noodles egg eggs
    vegetable vegetables broccoli carrot carrots tomato potato onion
    pepper corn mushroom lettuce cucumber bean beans drink coffee tea
    juice milk wine beer soda dish meal dessert sauce ketchup mustard
    head hair face eye eyes ear ears nose mouth neck chin beard mustache
    arm arms hand hands finger fingers leg legs foot feet knee knees
    shoulder shoulders chest waist hip tail paw paws wing wings beak horn
    horns mane fur feather feathers collar leash saddle harness
    ball bat racket racquet frisbee kite skateboard surfboard snowboard
    ski skis board net goal base bases mound court pitch bicycle bike
    motorcycle scooter car cars truck bus train plane airplane jet boat
    ship canoe kayak van taxi cab wheel wheels tire engine windshield
    bumper handlebar seat bench
    dog dogs puppy hound cat cats kitten tabby horse horses pony sheep
    lamb cow cows bull calf ox elephant elephants bear bears cub zebra
    zebras giraffe giraffes bird birds duck goose pigeon seagull eagle owl
    parrot chick hen rooster animal animals monkey deer fox rabbit bunny
    squirrel mouse rat fish turtle frog snake lizard insect butterfly bee
    phone cellphone smartphone laptop computer keyboard screen monitor tv
    television remote camera book books magazine newspaper paper pen
    pencil marker crayon card map
    chair chairs couch sofa settee armchair stool bed beds crib mattress
    toilet sink tub bathtub shower oven stove microwave toaster fridge
    refrigerator freezer dishwasher washer dryer fan heater vent
    umbrella parasol suitcase luggage briefcase
    hydrant lights meter pole post wire cable bridge building house roof
    tower church store shop market station platform track tracks rail
    railing stairs step steps doorway entrance exit gate garage yard
    garden park playground zoo kitchen bathroom bedroom room hallway
    office restaurant cafe piece slice chunk bunch stack pile row edge
    object item thing area spot background foreground image number letter
    word teddy sports cell dining potted wine fire traffic stop parking
    tennis baseball hair polar coffee picnic""".split()
)

# Multi-word nominals whose non-final words may not be nouns themselves.
COMPOUNDS = (
    "teddy bear", "hot dog", "fire hydrant", "traffic light", "stop sign",
    "parking meter", "sports ball", "baseball bat", "baseball glove",
    "tennis racket", "tennis racquet", "wine glass", "cell phone",
    "dining table", "potted plant", "hair drier", "hair dryer",
    "polar bear", "coffee table", "picnic table", "street sign",
    "train station", "baseball player", "tennis player", "police officer",
    "fire truck", "hot air balloon", "stuffed animal", "stuffed bear",
    "plush bear", "traffic sign", "light switch", "door handle",
    "window sill", "flower pot", "trash can", "coffee cup", "coffee mug",
    "t shirt",
)
