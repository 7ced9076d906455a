//! Shared inputs for the criterion benches: a mid-sized model source and a
//! Solidity unit with enough surface to keep the lint and layout passes busy.

/// Model with a handful of contracts, a struct, and a scenario.
pub const MODEL_SRC: &str = r#"system Market {
    goal "price discovery for on-chain listings"

    actor seller : person
    actor buyer : person

    contract Ownable @pattern(AU) {
        state {
            owner: address
        }
        modifiers {
            onlyOwner;
        }
        functions {
            transferOwnership(next: address) public uses (onlyOwner)
        }
    }

    contract Listing is Ownable @pattern(CEI, ES) {
        state {
            items: mapping(address => uint256)
            prices: uint256[]
            halted: bool
            token: Token
        }
        events {
            Listed(seller: address, price: uint256)
            Sold(buyer: address, price: uint256)
        }
        modifiers {
            notHalted;
        }
        functions {
            list(price: uint256) public uses (notHalted)
            buy(id: uint256) public payable uses (notHalted)
            halt() public uses (onlyOwner)
            priceOf(id: uint256) public view returns (uint256)
        }
    }

    interface Token {
        transfer(to: address, amount: uint256) external returns (bool)
        balanceOf(who: address) external view returns (uint256)
    }

    struct Offer {
        maker: address
        amount: uint256
        expires: uint64
    }

    scenario Purchase {
        participant buyer : person
        participant listing : contract Listing
        participant token : contract Token
        buyer -> listing : "buy(id)" [trans-msg]
        listing -> token : "transfer(seller, amount)" [direct-msg]
        token --> listing : "proceeds" [ethers]
    }
}
"#;

/// Solidity source exercising storage layout, loops, and call checks.
pub const SOL_SRC: &str = r#"pragma solidity 0.5.16;

contract Market {
    address owner;
    bool halted;
    uint128 feeNumerator;
    uint128 feeDenominator;
    uint256 totalVolume;
    mapping(address => uint256) balances;
    uint256[] prices;

    event Listed(address seller, uint256 price);

    modifier onlyOwner() {
        require(msg.sender == owner, "not owner");
        _;
    }

    constructor() public {
        owner = msg.sender;
        feeDenominator = 1000;
    }

    function list(uint256 price) external {
        require(price > 0, "zero price");
        prices.push(price);
        emit Listed(msg.sender, price);
    }

    function settle(address payable seller, uint256 amount) public onlyOwner {
        require(amount <= balances[seller], "over balance");
        balances[seller] -= amount;
        totalVolume += amount;
        seller.transfer(amount);
    }

    function sum() public view returns (uint256 acc) {
        for (uint256 i = 0; i < prices.length; i++) {
            acc += prices[i];
        }
    }
}
"#;
